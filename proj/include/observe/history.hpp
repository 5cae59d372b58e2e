#pragma once

#include <deque>
#include <functional>
#include <optional>

#include "observe/linalg.hpp"

namespace observe {

/**
 * @brief Time-indexed trajectory of an equally shaped Matrix signal.
 *
 * Samples are appended on the integration grid. Lookups between grid points
 * interpolate linearly; lookups on a grid point return the stored sample
 * unchanged. Old samples can be discarded with `discard_before` to bound
 * memory on long runs.
 */
class SignalHistory {
   public:
    SignalHistory() = default;

    /// Throws OrderingError unless t is strictly after the last time,
    /// DimensionError if v's shape differs from earlier samples.
    void append(double t, Matrix v);

    /// Linear interpolation at t_q. Throws OutOfRangeError outside
    /// [front_time(), back_time()].
    Matrix sample(double t_q) const;

    /// Drops samples while the one after them is still at or before `t_keep`,
    /// so a lookup at t_keep stays bracketed.
    void discard_before(double t_keep);

    bool empty() const { return times_.empty(); }
    std::size_t size() const { return times_.size(); }
    double front_time() const { return times_.front(); }
    double back_time() const { return times_.back(); }
    const Matrix& back() const { return samples_.back(); }
    /// Time of the very first sample ever appended (survives discards).
    std::optional<double> start_time() const { return start_; }

   private:
    std::deque<double> times_;
    std::deque<Matrix> samples_;
    std::optional<double> start_;
};

/**
 * @brief Known measurement delay d(t) with its bound d_M.
 *
 * d_M only sizes history buffers; it is never used by the estimator.
 */
struct DelayFunction {
    std::function<double(double)> d;
    double d_max = 0.0;

    double operator()(double t) const { return d(t); }
};

/// Clamped delayed time max(t0, t - d(t)).
double delayed_time(double t, const DelayFunction& delay, double t0 = 0.0);

}  // namespace observe
