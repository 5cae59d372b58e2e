#include <cmath>
#include <random>

#include "doctest.h"
#include "observe/history.hpp"

using observe::Matrix;
using observe::SignalHistory;

TEST_CASE("append grows the history and enforces ordering and shape") {
    SignalHistory h;
    h.append(0.0, Matrix::column({1.0}));
    CHECK(h.size() == 1);
    h.append(0.001, Matrix::column({2.0}));
    CHECK(h.size() == 2);

    SignalHistory dup;
    dup.append(0.0, Matrix::column({1.0}));
    CHECK_THROWS_AS(dup.append(0.0, Matrix::column({1.0})), observe::OrderingError);
    CHECK_THROWS_AS(dup.append(-1.0, Matrix::column({1.0})), observe::OrderingError);
    CHECK_THROWS_AS(dup.append(1.0, Matrix::column({1.0, 2.0})), observe::DimensionError);
}

TEST_CASE("sample interpolates linearly and is exact on the grid") {
    SignalHistory h;
    h.append(0.0, Matrix::column({0.0}));
    h.append(1.0, Matrix::column({2.0}));
    CHECK(h.sample(0.5)[0] == 1.0);
    CHECK(h.sample(1.0)[0] == 2.0);
    CHECK_THROWS_AS(h.sample(-0.1), observe::OutOfRangeError);
    CHECK_THROWS_AS(h.sample(1.1), observe::OutOfRangeError);
    CHECK_THROWS_AS(SignalHistory{}.sample(0.0), observe::OutOfRangeError);
}

TEST_CASE("grid samples come back bit-for-bit") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    SignalHistory h;
    std::vector<std::pair<double, Matrix>> stored;
    for (int i = 0; i < 200; ++i) {
        Matrix v{{dist(rng), dist(rng)}, {dist(rng), dist(rng)}};
        const double t = 0.001 * i;
        h.append(t, v);
        stored.emplace_back(t, v);
    }
    for (const auto& [t, v] : stored) CHECK(h.sample(t) == v);
    // Between grid points the value stays inside the bracketing samples.
    for (int i = 0; i + 1 < 200; ++i) {
        const double tq = 0.001 * i + 0.0004;
        const double lo = std::min(stored[i].second[0], stored[i + 1].second[0]);
        const double hi = std::max(stored[i].second[0], stored[i + 1].second[0]);
        const double v = h.sample(tq)[0];
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
    }
}

TEST_CASE("discard_before keeps the lookup window bracketed") {
    SignalHistory h;
    for (int i = 0; i <= 100; ++i) h.append(0.01 * i, Matrix::column({static_cast<double>(i)}));
    h.discard_before(0.505);
    CHECK(h.front_time() <= 0.505);
    CHECK(h.sample(0.505)[0] == doctest::Approx(50.5));
    CHECK(h.start_time() == 0.0);
    CHECK_THROWS_AS(h.sample(0.2), observe::OutOfRangeError);
}

TEST_CASE("delayed_time clamps at the start time") {
    const observe::DelayFunction c1{[](double) { return 1.0; }, 1.0};
    CHECK(observe::delayed_time(5.0, c1) == 4.0);
    CHECK(observe::delayed_time(0.5, c1, 0.0) == 0.0);

    const observe::DelayFunction c2{[](double t) { return 1.0 + 0.25 * std::sin(t); }, 1.25};
    CHECK(observe::delayed_time(2.0, c2) == doctest::Approx(0.7726756432935795).epsilon(1e-15));

    const observe::DelayFunction none{[](double) { return 0.0; }, 0.0};
    for (double t : {0.0, 0.3, 7.0}) {
        CHECK(observe::delayed_time(t, none) == t);
        const double phi = observe::delayed_time(t, c2);
        CHECK(phi >= 0.0);
        CHECK(phi <= t);
    }
}
