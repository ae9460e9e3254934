#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "corpusfit/stats.hpp"

namespace corpusfit {

struct ZipfFit {
    double s = 0.0;               // exponent, >= 0
    std::int64_t max_rank = 0;    // truncation K of the normalizer
    double loglik = 0.0;
    double normalizer = 0.0;      // H(K, s) = sum_{k<=K} k^-s
};

struct HeapsFit {
    double alpha = 0.0;
    double beta = 0.0;
    double loglik = 0.0;
    std::int64_t n_obs = 0;
    bool beta_at_bound = false;   // hit the search cap; growth faster than the model allows
};

struct ParametricCdf {
    enum class Kind { zipf, nhpp_poisson };
    Kind kind = Kind::zipf;
    std::vector<double> support;  // ascending
    std::vector<double> cum;      // nondecreasing, cum.back() == 1
    // fitted parameters, for report metadata
    double s = 0.0;
    double alpha = 0.0, beta = 0.0;
    std::int64_t length = 0;      // document length t for nhpp_poisson
};

// Maximizes a unimodal f on [lo, hi] to |dx| < tol by golden-section search;
// the endpoints are checked so boundary optima are returned exactly.
double golden_section_max(double lo, double hi, double tol, double (*f)(double, const void*),
                          const void* ctx);

double generalized_harmonic(std::int64_t max_rank, double s);

// -T log H(K, s) - s * sum_k c(w_k) log k, with T = table.total, K = #rows.
double zipf_loglik(const RankFrequencyTable& table, double s);

ZipfFit fit_zipf_mle(const RankFrequencyTable& table, double s_lo = 0.0, double s_hi = 5.0);

// F(k) = sum_{j<=k} j^-s / H(K, s) over ranks 1..K.
ParametricCdf zipf_cdf(const ZipfFit& fit);

// sum_i [ k_i (log a + b log t_i) - log(k_i!) - a t_i^b ]
double heaps_loglik(std::span<const TypeTokenObservation> obs, double alpha, double beta);

// (dL/da, dL/db)
std::pair<double, double> heaps_loglik_grad(std::span<const TypeTokenObservation> obs,
                                            double alpha, double beta);

// Profile MLE: alpha*(b) = sum k_i / sum t_i^b, 1-D search over beta.
HeapsFit fit_heaps_mle(std::span<const TypeTokenObservation> obs, double beta_lo = 0.0,
                       double beta_hi = 1.5);

// Poisson(alpha * t^beta), truncated where the remaining tail mass < 1e-12.
DiscretePmf nhpp_pmf(const HeapsFit& fit, std::int64_t t);

ParametricCdf nhpp_cdf(const HeapsFit& fit, std::int64_t t);

} // namespace corpusfit
