#include "corpusfit/random.hpp"

#include <algorithm>
#include <cmath>

namespace corpusfit {

std::int64_t draw_categorical(Rng& rng, std::span<const double> probs) {
    const double u = uniform01(rng);
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cum += probs[i];
        if (u < cum) return static_cast<std::int64_t>(i);
    }
    return static_cast<std::int64_t>(probs.size()) - 1;
}

std::int64_t draw_index_from_cdf(std::span<const double> cum, double u) {
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) return static_cast<std::int64_t>(cum.size()) - 1;
    return static_cast<std::int64_t>(it - cum.begin());
}

namespace {

// Generic two-frontier inverse-cdf walk around the mode. `log_pmf_at` gives
// log p(mode); `ratio_up(k)` = p(k+1)/p(k); `ratio_down(k)` = p(k-1)/p(k).
// Enumerating support in decreasing-probability-ish order keeps the expected
// number of visited states at O(sd) instead of O(range).
template <typename RatioUp, typename RatioDown>
std::int64_t mode_walk(double u, std::int64_t mode, std::int64_t lo, std::int64_t hi,
                       double log_p_mode, RatioUp ratio_up, RatioDown ratio_down) {
    double p_mode = std::exp(log_p_mode);
    double cum = p_mode;
    if (u < cum) return mode;
    std::int64_t dn = mode - 1, up = mode + 1;
    double p_dn = dn >= lo ? p_mode * ratio_down(mode) : 0.0;
    double p_up = up <= hi ? p_mode * ratio_up(mode) : 0.0;
    std::int64_t last = mode;
    while (dn >= lo || up <= hi) {
        bool take_dn = dn >= lo && (up > hi || p_dn >= p_up);
        if (take_dn) {
            cum += p_dn;
            last = dn;
            if (u < cum) return dn;
            p_dn = (dn - 1 >= lo) ? p_dn * ratio_down(dn) : 0.0;
            --dn;
        } else {
            cum += p_up;
            last = up;
            if (u < cum) return up;
            p_up = (up + 1 <= hi) ? p_up * ratio_up(up) : 0.0;
            ++up;
        }
    }
    return last; // u fell into accumulated rounding slack
}

} // namespace

std::int64_t draw_binomial(Rng& rng, std::int64_t n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - draw_binomial(rng, n, 1.0 - p);
    const double u = uniform01(rng);
    const double q = 1.0 - p;
    const double nd = static_cast<double>(n);
    std::int64_t mode = static_cast<std::int64_t>(std::floor((nd + 1.0) * p));
    mode = std::clamp<std::int64_t>(mode, 0, n);
    const double md = static_cast<double>(mode);
    const double log_p_mode = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                              std::lgamma(nd - md + 1.0) + md * std::log(p) +
                              (nd - md) * std::log(q);
    auto up = [&](std::int64_t k) {
        return (nd - static_cast<double>(k)) / (static_cast<double>(k) + 1.0) * (p / q);
    };
    auto down = [&](std::int64_t k) {
        return static_cast<double>(k) * q / ((nd - static_cast<double>(k) + 1.0) * p);
    };
    return mode_walk(u, mode, 0, n, log_p_mode, up, down);
}

std::int64_t draw_hypergeometric(Rng& rng, std::int64_t total, std::int64_t marked,
                                 std::int64_t draws) {
    if (draws <= 0 || marked <= 0) return 0;
    if (draws >= total) return marked;
    if (marked >= total) return draws;
    const std::int64_t lo = std::max<std::int64_t>(0, draws - (total - marked));
    const std::int64_t hi = std::min(draws, marked);
    if (lo == hi) return lo;
    const double u = uniform01(rng);
    std::int64_t mode = static_cast<std::int64_t>(
        std::floor(static_cast<double>(draws + 1) * static_cast<double>(marked + 1) /
                   static_cast<double>(total + 2)));
    mode = std::clamp(mode, lo, hi);
    auto lchoose = [](std::int64_t a, std::int64_t b) {
        return std::lgamma(static_cast<double>(a) + 1.0) -
               std::lgamma(static_cast<double>(b) + 1.0) -
               std::lgamma(static_cast<double>(a - b) + 1.0);
    };
    const double log_p_mode = lchoose(marked, mode) + lchoose(total - marked, draws - mode) -
                              lchoose(total, draws);
    auto up = [&](std::int64_t k) {
        const double kk = static_cast<double>(k);
        return (static_cast<double>(marked) - kk) * (static_cast<double>(draws) - kk) /
               ((kk + 1.0) * (static_cast<double>(total - marked - draws) + kk + 1.0));
    };
    auto down = [&](std::int64_t k) {
        const double kk = static_cast<double>(k);
        return kk * (static_cast<double>(total - marked - draws) + kk) /
               ((static_cast<double>(marked) - kk + 1.0) * (static_cast<double>(draws) - kk + 1.0));
    };
    return mode_walk(u, mode, lo, hi, log_p_mode, up, down);
}

std::int64_t draw_poisson(Rng& rng, double lambda) {
    if (lambda <= 0.0) return 0;
    const double u = uniform01(rng);
    std::int64_t mode = static_cast<std::int64_t>(std::floor(lambda));
    const double md = static_cast<double>(mode);
    const double log_p_mode = md * std::log(lambda) - lambda - std::lgamma(md + 1.0);
    // Upper walk bound: far past any mass that matters at double precision.
    const std::int64_t hi = mode + 40 + static_cast<std::int64_t>(12.0 * std::sqrt(lambda + 1.0));
    auto up = [&](std::int64_t k) { return lambda / (static_cast<double>(k) + 1.0); };
    auto down = [&](std::int64_t k) { return static_cast<double>(k) / lambda; };
    return mode_walk(u, mode, 0, hi, log_p_mode, up, down);
}

} // namespace corpusfit
