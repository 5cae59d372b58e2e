#pragma once

#include <stdexcept>
#include <string>

namespace observe {

/// Shapes of the operands do not fit the operation.
class DimensionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A history append went backwards (or repeated) in time.
class OrderingError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A history lookup fell outside the recorded time range.
class OutOfRangeError : public std::out_of_range {
   public:
    using std::out_of_range::out_of_range;
};

/// A vector field or update produced NaN/Inf. Carries the simulation time.
class NumericFailure : public std::runtime_error {
   public:
    NumericFailure(const std::string& what, double t)
        : std::runtime_error(what + " at t=" + std::to_string(t)), time_(t) {}

    double time() const { return time_; }

   private:
    double time_;
};

/// Invalid scenario configuration or gains.
class ConfigError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace observe
