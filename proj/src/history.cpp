#include "observe/history.hpp"

#include <algorithm>
#include <string>

namespace observe {

void SignalHistory::append(double t, Matrix v) {
    if (!times_.empty()) {
        if (!(t > times_.back())) {
            throw OrderingError("SignalHistory::append: t=" + std::to_string(t) +
                                " is not after last recorded time " +
                                std::to_string(times_.back()));
        }
        if (!v.same_shape(samples_.back())) {
            throw DimensionError("SignalHistory::append: sample shape differs from history");
        }
    } else if (!start_) {
        start_ = t;
    }
    times_.push_back(t);
    samples_.push_back(std::move(v));
}

Matrix SignalHistory::sample(double t_q) const {
    if (times_.empty() || t_q < times_.front() || t_q > times_.back()) {
        std::string range = times_.empty() ? std::string("empty history")
                                           : "[" + std::to_string(times_.front()) + ", " +
                                                 std::to_string(times_.back()) + "]";
        throw OutOfRangeError("SignalHistory::sample: t=" + std::to_string(t_q) +
                              " outside recorded range " + range);
    }
    // First time >= t_q.
    const auto it = std::lower_bound(times_.begin(), times_.end(), t_q);
    const auto hi = static_cast<std::size_t>(it - times_.begin());
    if (times_[hi] == t_q) return samples_[hi];

    const std::size_t lo = hi - 1;
    const double alpha = (t_q - times_[lo]) / (times_[hi] - times_[lo]);
    Matrix out = samples_[lo];
    const auto& b = samples_[hi];
    auto dst = out.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += alpha * (src[i] - dst[i]);
    return out;
}

void SignalHistory::discard_before(double t_keep) {
    while (times_.size() > 1 && times_[1] <= t_keep) {
        times_.pop_front();
        samples_.pop_front();
    }
}

double delayed_time(double t, const DelayFunction& delay, double t0) {
    return std::max(t0, t - delay(t));
}

}  // namespace observe
