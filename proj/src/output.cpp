#include "fluxsr/output.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fluxsr/error.hpp"

namespace fluxsr {

namespace {

constexpr std::string_view kUnits =
    "# omega: angular frequency (rad/ns); value: one-sided spectral density, arbitrary (relative) units\n";

void echo_lines(std::ostream &out, const RunConfig &cfg) {
    std::istringstream echo(echo_config(cfg));
    for (std::string line; std::getline(echo, line);) {
        out << kEchoPrefix << line << '\n';
    }
}

std::string exact_or_nan(double v) { return std::isfinite(v) ? format_exact(v) : std::string("nan"); }

}  // namespace

std::optional<OutputFormat> parse_output_format(std::string_view text) {
    if (text == "csv") {
        return OutputFormat::csv;
    }
    if (text == "structured" || text == "json") {
        return OutputFormat::structured;
    }
    return std::nullopt;
}

std::string_view file_extension(OutputFormat f) { return f == OutputFormat::csv ? ".csv" : ".json"; }

std::string render_spectrum(const Spectrum &spectrum, const RunConfig &cfg, OutputFormat format) {
    if (spectrum.values.empty()) {
        throw Error("refusing to emit an empty spectrum");
    }
    if (format == OutputFormat::structured) {
        nlohmann::ordered_json j;
        j["kind"] = "spectrum";
        j["component"] = to_string(spectrum.component);
        j["n_realizations"] = spectrum.n_realizations;
        j["master_seed"] = cfg.ensemble.master_seed;
        j["config"] = echo_config(cfg);
        j["omega"] = spectrum.frequencies;
        j["value"] = spectrum.values;
        return j.dump(1) + "\n";
    }
    std::ostringstream out;
    out << "# fluxsr spectrum\n";
    out << "# component = " << to_string(spectrum.component) << '\n';
    out << "# n_realizations = " << spectrum.n_realizations << '\n';
    out << "# master_seed = " << cfg.ensemble.master_seed << '\n';
    out << kUnits;
    echo_lines(out, cfg);
    out << "omega,value\n";
    for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
        out << format_exact(spectrum.frequencies[k]) << ',' << format_exact(spectrum.values[k]) << '\n';
    }
    return out.str();
}

std::string render_sr_curve(std::span<const SrPoint> curve, const RunConfig &cfg, Component component, Band band,
                            OutputFormat format) {
    if (curve.empty()) {
        throw Error("refusing to emit an empty SR curve");
    }
    if (format == OutputFormat::structured) {
        nlohmann::ordered_json j;
        j["kind"] = "sr_curve";
        j["component"] = to_string(component);
        j["band"] = {band.low, band.high};
        j["master_seed"] = cfg.ensemble.master_seed;
        j["config"] = echo_config(cfg);
        auto points = nlohmann::ordered_json::array();
        for (const auto &p : curve) {
            nlohmann::ordered_json row;
            row["noise_intensity_d"] = p.noise_intensity;
            if (p.peak) {
                row["height"] = p.peak->height;
                row["frequency"] = p.peak->frequency;
                row["fwhm"] = p.peak->fwhm;
            } else {
                row["error"] = p.error;
            }
            points.push_back(row);
        }
        j["points"] = points;
        return j.dump(1) + "\n";
    }
    std::ostringstream out;
    out << "# fluxsr stochastic-resonance curve\n";
    out << "# component = " << to_string(component) << '\n';
    out << "# band = " << format_exact(band.low) << ", " << format_exact(band.high) << '\n';
    out << "# master_seed = " << cfg.ensemble.master_seed << '\n';
    out << "# height: peak spectral density, arbitrary (relative) units; frequency, fwhm: rad/ns\n";
    for (const auto &p : curve) {
        if (!p.peak) {
            out << "# D = " << format_exact(p.noise_intensity) << ": " << p.error << '\n';
        }
    }
    echo_lines(out, cfg);
    out << "noise_intensity_d,height,frequency,fwhm\n";
    for (const auto &p : curve) {
        double nan = std::nan("");
        out << format_exact(p.noise_intensity) << ',' << exact_or_nan(p.peak ? p.peak->height : nan) << ','
            << exact_or_nan(p.peak ? p.peak->frequency : nan) << ',' << exact_or_nan(p.peak ? p.peak->fwhm : nan)
            << '\n';
    }
    return out.str();
}

std::string render_trajectory(const Trajectory &traj, const RunConfig &cfg, OutputFormat format) {
    if (traj.states.empty()) {
        throw Error("refusing to emit an empty trajectory");
    }
    auto current = [&](const BlochState &s) { return traj.current_x * s.x + traj.current_z * s.z; };
    if (format == OutputFormat::structured) {
        nlohmann::ordered_json j;
        j["kind"] = "trajectory";
        j["seed"] = traj.seed;
        j["config"] = echo_config(cfg);
        std::vector<double> x, y, z, i;
        for (const auto &s : traj.states) {
            x.push_back(s.x);
            y.push_back(s.y);
            z.push_back(s.z);
            i.push_back(current(s));
        }
        j["t"] = traj.times;
        j["X"] = x;
        j["Y"] = y;
        j["Z"] = z;
        j["I"] = i;
        return j.dump(1) + "\n";
    }
    std::ostringstream out;
    out << "# fluxsr trajectory\n";
    out << "# seed = " << traj.seed << '\n';
    out << "# t: ns; X, Y, Z: Bloch components in the energy eigenbasis; I: circulating current / I_p\n";
    echo_lines(out, cfg);
    out << "t,X,Y,Z,I\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const BlochState &s = traj.states[k];
        out << format_exact(traj.times[k]) << ',' << format_exact(s.x) << ',' << format_exact(s.y) << ','
            << format_exact(s.z) << ',' << format_exact(current(s)) << '\n';
    }
    return out.str();
}

void write_file(const std::filesystem::path &path, std::string_view text) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

}  // namespace fluxsr
