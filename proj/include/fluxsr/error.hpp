#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fluxsr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
   public:
    enum class Kind { parse, validation, stability_guard, unknown_preset };

    ConfigError(Kind kind, const std::string &message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

   private:
    Kind kind_;
};

/// A trajectory left the region |s| <= 10; the step size is too large for the noise level.
class NumericOverflow : public Error {
   public:
    NumericOverflow(double time, double norm, std::optional<std::size_t> trajectory_index = {});

    double time() const { return time_; }
    double norm() const { return norm_; }
    std::optional<std::size_t> trajectory_index() const { return trajectory_index_; }

   private:
    double time_;
    double norm_;
    std::optional<std::size_t> trajectory_index_;
};

class InvalidState : public Error {
   public:
    using Error::Error;
};

class IoError : public Error {
   public:
    using Error::Error;
};

class SpectrumError : public Error {
   public:
    enum class Kind { series_too_short, grid_mismatch, no_local_maximum, bad_band };

    SpectrumError(Kind kind, const std::string &message) : Error(message), kind_(kind) {}

    Kind kind() const { return kind_; }

   private:
    Kind kind_;
};

}  // namespace fluxsr
