#include "fluxsr/config.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;  // 1-based
};

[[noreturn]] void parse_fail(const Token &at, const std::string &what) {
    throw ConfigError(ConfigError::Kind::parse, "parse error at line " + std::to_string(at.line) + ", column " +
                                                    std::to_string(at.column) + ": " + what);
}

Token trim(Token t) {
    std::size_t b = 0;
    while (b < t.text.size() && (t.text[b] == ' ' || t.text[b] == '\t')) {
        ++b;
    }
    std::size_t e = t.text.size();
    while (e > b && (t.text[e - 1] == ' ' || t.text[e - 1] == '\t' || t.text[e - 1] == '\r')) {
        --e;
    }
    return {t.text.substr(b, e - b), t.line, t.column + b};
}

std::vector<Token> split_list(const Token &value) {
    std::vector<Token> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = value.text.find(',', start);
        std::size_t end = comma == std::string_view::npos ? value.text.size() : comma;
        out.push_back(trim({value.text.substr(start, end - start), value.line, value.column + start}));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double to_double(const Token &t) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.text.empty() || ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
        parse_fail(t, "expected a number, got '" + std::string(t.text) + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const Token &t) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.text.empty() || ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
        parse_fail(t, "expected a non-negative integer, got '" + std::string(t.text) + "'");
    }
    return v;
}

template <typename T>
T to_enum(const Token &t, std::optional<T> parsed, std::string_view expected) {
    if (!parsed) {
        parse_fail(t, "unknown value '" + std::string(t.text) + "', expected " + std::string(expected));
    }
    return *parsed;
}

using Handler = std::function<void(RunConfig &, const Token &)>;

const std::map<std::string, std::map<std::string, Handler>, std::less<>> &handlers() {
    static const std::map<std::string, std::map<std::string, Handler>, std::less<>> table = {
        {"qubit",
         {
             {"ip_phi0", [](RunConfig &c, const Token &v) { c.ensemble.base.qubit.ip_phi0 = to_double(v); }},
             {"delta", [](RunConfig &c, const Token &v) { c.ensemble.base.qubit.delta = to_double(v); }},
             {"gamma_phi", [](RunConfig &c, const Token &v) { c.ensemble.base.qubit.gamma_phi = to_double(v); }},
             {"gamma_r", [](RunConfig &c, const Token &v) { c.ensemble.base.qubit.gamma_r = to_double(v); }},
             {"temperature",
              [](RunConfig &c, const Token &v) { c.ensemble.base.qubit.temperature = to_double(v); }},
         }},
        {"drive",
         {
             {"f_dc", [](RunConfig &c, const Token &v) { c.ensemble.base.drive.f_dc = to_double(v); }},
             {"f_ac", [](RunConfig &c, const Token &v) { c.ensemble.base.drive.f_ac = to_double(v); }},
             {"omega_d", [](RunConfig &c, const Token &v) { c.ensemble.base.drive.omega_d = to_double(v); }},
         }},
        {"noise",
         {
             {"intensity_d", [](RunConfig &c, const Token &v) { c.ensemble.base.noise.intensity_d = to_double(v); }},
             {"tau", [](RunConfig &c, const Token &v) { c.ensemble.base.noise.tau = to_double(v); }},
             {"coupling_lambda",
              [](RunConfig &c, const Token &v) { c.ensemble.base.noise.coupling_lambda = to_double(v); }},
         }},
        {"run",
         {
             {"dt", [](RunConfig &c, const Token &v) { c.ensemble.base.dt = to_double(v); }},
             {"t_transient", [](RunConfig &c, const Token &v) { c.ensemble.base.t_transient = to_double(v); }},
             {"t_total", [](RunConfig &c, const Token &v) { c.ensemble.base.t_total = to_double(v); }},
             {"record_stride", [](RunConfig &c, const Token &v) { c.ensemble.base.record_stride = to_unsigned(v); }},
             {"stepper",
              [](RunConfig &c, const Token &v) {
                  c.ensemble.base.stepper = to_enum(v, parse_stepper(v.text), "heun or ito");
              }},
             {"initial_state",
              [](RunConfig &c, const Token &v) {
                  if (v.text == "thermal") {
                      c.ensemble.base.initial_state.reset();
                      return;
                  }
                  auto parts = split_list(v);
                  if (parts.size() != 3) {
                      parse_fail(v, "initial_state must be 'thermal' or 'x, y, z'");
                  }
                  c.ensemble.base.initial_state = BlochState{to_double(parts[0]), to_double(parts[1]),
                                                             to_double(parts[2])};
              }},
             {"n_realizations", [](RunConfig &c, const Token &v) { c.ensemble.n_realizations = to_unsigned(v); }},
             {"master_seed", [](RunConfig &c, const Token &v) { c.ensemble.master_seed = to_unsigned(v); }},
             {"window",
              [](RunConfig &c, const Token &v) { c.spectral.window = to_enum(v, parse_window(v.text), "hann or rect"); }},
             {"segment_length", [](RunConfig &c, const Token &v) { c.spectral.segment_length = to_unsigned(v); }},
             {"estimator",
              [](RunConfig &c, const Token &v) {
                  c.spectral.estimator = to_enum(v, parse_estimator(v.text), "power or amplitude");
              }},
             {"components",
              [](RunConfig &c, const Token &v) {
                  c.components.clear();
                  for (const auto &part : split_list(v)) {
                      c.components.push_back(to_enum(part, parse_component(part.text), "X, Y, Z or I"));
                  }
              }},
         }},
        {"sweep",
         {
             {"parameter",
              [](RunConfig &c, const Token &v) {
                  if (!c.sweep) {
                      c.sweep.emplace();
                  }
                  c.sweep->parameter = to_enum(v, parse_sweep_parameter(v.text),
                                               "noise_intensity_d, noise_tau, drive_f_ac or drive_omega_d");
              }},
             {"values",
              [](RunConfig &c, const Token &v) {
                  if (!c.sweep) {
                      c.sweep.emplace();
                  }
                  c.sweep->values.clear();
                  for (const auto &part : split_list(v)) {
                      c.sweep->values.push_back(to_double(part));
                  }
              }},
         }},
    };
    return table;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

EnsembleOptions RunConfig::options(std::size_t threads) const {
    EnsembleOptions o;
    o.components = components;
    o.spectral = spectral;
    o.threads = threads;
    return o;
}

void RunConfig::validate() const {
    ensemble.validate();
    if (components.empty()) {
        throw ConfigError(ConfigError::Kind::validation, "invalid configuration: run.components is empty");
    }
    std::size_t record = std::bit_floor(ensemble.base.record_length());
    std::size_t seg = spectral.segment_length;
    if (seg != 0 && (!std::has_single_bit(seg) || seg < 2 || seg > record)) {
        throw ConfigError(ConfigError::Kind::validation,
                          "invalid configuration: run.segment_length must be 0 or a power of two in [2, " +
                              std::to_string(record) + "]");
    }
    if (sweep) {
        sweep->validate();
        for (double v : sweep->values) {
            apply_axis(ensemble.base, sweep->parameter, v).validate();
        }
    }
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    cfg.ensemble.base.drive.omega_d = 0.0;
    bool omega_d_given = false;
    std::set<std::string, std::less<>> seen;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        Token line = trim({text.substr(pos, eol - pos), ++line_no, 1});
        pos = eol + 1;

        if (std::size_t hash = line.text.find_first_of("#;"); hash != std::string_view::npos) {
            line = trim({line.text.substr(0, hash), line.line, line.column});
        }
        if (line.text.empty()) {
            continue;
        }
        if (line.text.front() == '[') {
            if (line.text.back() != ']') {
                parse_fail(line, "unterminated section header");
            }
            Token name = trim({line.text.substr(1, line.text.size() - 2), line.line, line.column + 1});
            if (!handlers().contains(name.text)) {
                parse_fail(name, "unknown section '" + std::string(name.text) + "'");
            }
            section = std::string(name.text);
            continue;
        }
        std::size_t eq = line.text.find('=');
        if (eq == std::string_view::npos) {
            parse_fail(line, "expected 'key = value'");
        }
        Token key = trim({line.text.substr(0, eq), line.line, line.column});
        Token value = trim({line.text.substr(eq + 1), line.line, line.column + eq + 1});
        if (section.empty()) {
            parse_fail(key, "key '" + std::string(key.text) + "' outside of a section");
        }
        const auto &keys = handlers().find(section)->second;
        auto handler = keys.find(std::string(key.text));
        if (handler == keys.end()) {
            parse_fail(key, "unknown key '" + std::string(key.text) + "' in section [" + section + "]");
        }
        if (!seen.insert(section + "." + std::string(key.text)).second) {
            parse_fail(key, "duplicate key '" + std::string(key.text) + "'");
        }
        if (value.text.empty()) {
            parse_fail(value, "missing value for '" + std::string(key.text) + "'");
        }
        handler->second(cfg, value);
        omega_d_given = omega_d_given || (section == "drive" && key.text == "omega_d");
    }

    if (cfg.sweep && (!seen.contains("sweep.parameter") || !seen.contains("sweep.values"))) {
        throw ConfigError(ConfigError::Kind::parse, "parse error: [sweep] needs both 'parameter' and 'values'");
    }
    if (!seen.contains("run.segment_length")) {
        std::size_t record = std::bit_floor(std::max<std::size_t>(cfg.ensemble.base.record_length(), 2));
        cfg.spectral.segment_length = std::min(kDefaultSegmentLength, record);
    }
    if (!omega_d_given) {
        // Resonant drive by default.
        cfg.ensemble.base.qubit.validate();
        cfg.ensemble.base.drive.omega_d = cfg.ensemble.base.splitting();
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::filesystem::path &path) {
    std::string text = read_file(path);
    if (text.starts_with('{')) {
        // Structured output file: the echo is stored under "config".
        auto doc = nlohmann::json::parse(text, nullptr, false);
        if (doc.is_discarded() || !doc.contains("config") || !doc["config"].is_string()) {
            throw ConfigError(ConfigError::Kind::parse, "parse error: " + path.string() +
                                                            " is not a structured output file with a config");
        }
        return parse_config(doc["config"].get<std::string>());
    }
    if (auto embedded = extract_embedded_config(text)) {
        return parse_config(*embedded);
    }
    return parse_config(text);
}

std::optional<std::string> extract_embedded_config(std::string_view file_text) {
    std::string out;
    bool found = false;
    std::size_t pos = 0;
    while (pos < file_text.size()) {
        std::size_t eol = file_text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = file_text.size();
        }
        std::string_view line = file_text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.starts_with(kEchoPrefix)) {
            out.append(line.substr(kEchoPrefix.size()));
            out.push_back('\n');
            found = true;
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return out;
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

std::string format_exact(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), ptr);
}

std::string echo_config(const RunConfig &cfg) {
    const SimulationConfig &b = cfg.ensemble.base;
    std::ostringstream out;
    auto num = [&](std::string_view key, double v) { out << key << " = " << format_number(v) << '\n'; };
    auto uint = [&](std::string_view key, std::uint64_t v) { out << key << " = " << v << '\n'; };

    out << "[qubit]\n";
    num("ip_phi0", b.qubit.ip_phi0);
    num("delta", b.qubit.delta);
    num("gamma_phi", b.qubit.gamma_phi);
    num("gamma_r", b.qubit.gamma_r);
    num("temperature", b.qubit.temperature);
    out << "[drive]\n";
    num("f_dc", b.drive.f_dc);
    num("f_ac", b.drive.f_ac);
    num("omega_d", b.drive.omega_d);
    out << "[noise]\n";
    num("intensity_d", b.noise.intensity_d);
    num("tau", b.noise.tau);
    num("coupling_lambda", b.noise.coupling_lambda);
    out << "[run]\n";
    num("dt", b.dt);
    num("t_transient", b.t_transient);
    num("t_total", b.t_total);
    uint("record_stride", b.record_stride);
    out << "stepper = " << to_string(b.stepper) << '\n';
    if (b.initial_state) {
        out << "initial_state = " << format_number(b.initial_state->x) << ", " << format_number(b.initial_state->y)
            << ", " << format_number(b.initial_state->z) << '\n';
    } else {
        out << "initial_state = thermal\n";
    }
    uint("n_realizations", cfg.ensemble.n_realizations);
    uint("master_seed", cfg.ensemble.master_seed);
    out << "window = " << to_string(cfg.spectral.window) << '\n';
    uint("segment_length", cfg.spectral.segment_length);
    out << "estimator = " << to_string(cfg.spectral.estimator) << '\n';
    out << "components = ";
    for (std::size_t i = 0; i < cfg.components.size(); ++i) {
        out << (i ? ", " : "") << to_string(cfg.components[i]);
    }
    out << '\n';
    if (cfg.sweep) {
        out << "[sweep]\n";
        out << "parameter = " << to_string(cfg.sweep->parameter) << '\n';
        out << "values = ";
        for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
            out << (i ? ", " : "") << format_number(cfg.sweep->values[i]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace fluxsr
