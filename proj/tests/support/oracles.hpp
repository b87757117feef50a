#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library code they check.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// Event counts of a per-tick Bernoulli process: each tick of length `tick`
// holds an event with probability rate * tick.
inline std::vector<long> bernoulli_counts(double rate, double duration, double tick, int runs, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution hit(rate * tick);
    const auto ticks = static_cast<long>(std::llround(duration / tick));
    std::vector<long> counts;
    counts.reserve(runs);
    for (int r = 0; r < runs; ++r) {
        long n = 0;
        for (long i = 0; i < ticks; ++i) n += hit(gen);
        counts.push_back(n);
    }
    return counts;
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
// distribution. Ties are handled by stepping both ECDFs past equal values,
// which makes the test conservative for discrete data.
template <typename T>
KsResult ks_two_sample(std::vector<T> a, std::vector<T> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        T v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        q += term;
        if (std::abs(term) < 1e-12) break;
    }
    if (lambda < 1e-3) q = 1.0;
    return {d, std::clamp(q, 0.0, 1.0)};
}

struct ChiSquareResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
};

// Goodness of fit of integer counts to Poisson(mean). Values are pooled
// left to right into bins expecting at least 5; the first bin starts at 0
// and the last one takes the whole upper tail.
inline ChiSquareResult chi_square_poisson(const std::vector<long>& counts, double mean) {
    boost::math::poisson_distribution<double> pois(mean);
    const double n = static_cast<double>(counts.size());
    auto cdf = [&](long k) { return k < 0 ? 0.0 : boost::math::cdf(pois, static_cast<double>(k)); };

    std::vector<long> upper_edges;  // inclusive upper value of each bin
    long lo = 0;
    const long last = static_cast<long>(mean + 20.0 * std::sqrt(mean) + 20.0);
    for (long k = 0; k <= last; ++k) {
        if (n * (cdf(k) - cdf(lo - 1)) >= 5.0 && n * (1.0 - cdf(k)) >= 5.0) {
            upper_edges.push_back(k);
            lo = k + 1;
        }
    }
    upper_edges.push_back(std::numeric_limits<long>::max());

    double stat = 0.0;
    long bin_lo = 0;
    for (long hi : upper_edges) {
        double p_hi = hi == std::numeric_limits<long>::max() ? 1.0 : cdf(hi);
        double e = n * (p_hi - cdf(bin_lo - 1));
        double o = static_cast<double>(
            std::count_if(counts.begin(), counts.end(), [&](long v) { return v >= bin_lo && v <= hi; }));
        stat += (o - e) * (o - e) / e;
        if (hi != std::numeric_limits<long>::max()) bin_lo = hi + 1;
    }
    int dof = static_cast<int>(upper_edges.size()) - 1;
    double p = dof > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), stat))
                       : 1.0;
    return {stat, dof, p};
}

// Test windows of a campaign: `window` seconds armed at the start of every
// `cycle`, up to `duration`.
struct Window {
    double start;
    double end;
};

inline std::vector<Window> windows(double duration, double cycle = 40.0, double window = 30.0) {
    std::vector<Window> out;
    for (double s = 0.0; s < duration; s += cycle) out.push_back({s, std::min(s + window, duration)});
    return out;
}

// Reset times of a broken chip: one reset every `period` inside each
// window, `per_window` of them, in the last `n_windows` windows.
inline std::vector<double> broken_bunches(const std::vector<Window>& ws, std::size_t n_windows, int per_window,
                                          double period = 7.0) {
    std::vector<double> out;
    for (std::size_t w = ws.size() - std::min(n_windows, ws.size()); w < ws.size(); ++w) {
        for (int k = 0; k < per_window; ++k) {
            double t = ws[w].start + k * period;
            if (t < ws[w].end) out.push_back(t);
        }
    }
    return out;
}

// `n` resets spread evenly over [from, to), each placed 3 s into a slot so no
// two are closer than the slot width.
inline std::vector<double> scattered(std::size_t n, double from, double to) {
    std::vector<double> out;
    if (n == 0) return out;
    const double slot = (to - from) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(from + slot * static_cast<double>(i) + std::min(3.0, slot / 2));
    return out;
}

// Closed forms used as independent references for the physics numbers.
// MeV -> J is 1.602e-13, mg -> kg is 1e-6.
inline double dose(double fluence, double let) { return fluence * let * 1.602e-13 / 1e-6; }
inline double seconds_in_years(double years) { return years * 365.25 * 24.0 * 3600.0; }

}  // namespace oracle
