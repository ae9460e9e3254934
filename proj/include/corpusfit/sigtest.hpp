#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "corpusfit/corpus.hpp"
#include "corpusfit/fit.hpp"
#include "corpusfit/stats.hpp"

namespace corpusfit {

// Sample with multiplicity: values sorted ascending and unique, weights >= 1.
struct WeightedSample {
    std::vector<double> values;
    std::vector<std::int64_t> weights;
    std::int64_t total = 0;

    static WeightedSample from_values(std::span<const double> xs);
    static WeightedSample from_counts(const std::map<double, std::int64_t>& counts);
};

struct EmpiricalCdf {
    std::vector<double> support;
    std::vector<double> cum; // nondecreasing, cum.back() == 1
    std::int64_t n = 0;      // total weight

    static EmpiricalCdf from_sample(const WeightedSample& sample);
};

// Each token occurrence contributes its rank, so the cdf is over occurrences.
WeightedSample rank_weighted_sample(const RankFrequencyTable& table);

struct McOptions {
    std::int64_t iterations = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
};

enum class KsVariant { one_sample, two_sample };

// Which reference the KS distance was taken against: a parametric law fit on
// the evaluated sample (D_ptheta), the same law fit on the reference corpus
// (D_phat), or the reference empirical cdf directly (D_p).
enum class RefKind { parametric_model, parametric_reference, empirical };

const char* to_string(KsVariant v);
const char* to_string(RefKind k);

struct KsResult {
    double d = 0.0;
    double p_value = 1.0;
    std::int64_t mc_iterations = 0;
    KsVariant variant = KsVariant::two_sample;
    RefKind reference_kind = RefKind::empirical;
};

// sup over the union support of |F1 - F2| for right-continuous step cdfs.
double ks_distance(const EmpiricalCdf& f1, const EmpiricalCdf& f2);
double ks_distance(const EmpiricalCdf& f1, const ParametricCdf& f2);

// Monte-Carlo p-value: fraction of synthetic same-size samples drawn from the
// reference whose D >= observed, smoothed as (b+1)/(B+1).
KsResult ks_one_sample(const WeightedSample& sample, const ParametricCdf& ref,
                       const McOptions& mc, RefKind kind = RefKind::parametric_reference);

// Permutation p-value: pool, re-split into sizes (n, m), recompute D.
KsResult ks_two_sample(const WeightedSample& s1, const WeightedSample& s2,
                       const McOptions& mc);

struct TvdPair {
    double sup = 0.0;     // sup_y |p1(y) - p2(y)|, the headline statistic
    double half_l1 = 0.0; // conventional form, reported alongside
};

TvdPair tvd(const CategoricalPmf& p1, const CategoricalPmf& p2);

struct TvdResult {
    double tvd_sup = 0.0;
    double tvd_l1_half = 0.0;
    double p_value = 1.0;
    std::int64_t permutations = 0;
    std::vector<std::string> warnings;
};

// Token multisets in, permutation sampling distribution of the sup-form TVD.
TvdResult tvd_permutation_test(const Vocabulary& s1, const Vocabulary& s2,
                               const McOptions& mc);

struct PermOptions {
    std::int64_t iterations = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    // Enumerate every split when C(n+m, n) is at most this; else Monte Carlo.
    std::int64_t exhaustive_threshold = 200000;
};

struct PermutationResult {
    double statistic = 0.0;          // mean(s1) - mean(s2)
    double centered_statistic = 0.0; // statistic minus the permutation-distribution mean
    double p_value = 1.0;
    std::int64_t permutations = 0;
    bool exhaustive = false;
};

// Two-tailed unpaired permutation test on the difference in means.
PermutationResult mean_diff_permutation_test(std::span<const double> s1,
                                             std::span<const double> s2,
                                             const PermOptions& opts);

struct LengthBucketKs {
    std::int64_t t = 0;
    bool skipped = false; // below min_bucket population on some side
    std::int64_t n_sample = 0;
    std::int64_t n_reference = 0;
    KsResult result;
};

std::vector<std::int64_t> default_length_grid(); // 10, 20, ..., 500

// Distribution of type counts u(y_<=t) at each grid length, compared across
// two corpora (D_p) or against Poisson(alpha * t^beta) from a Heaps fit.
std::vector<LengthBucketKs> ks_by_length(const Corpus& sample, const Corpus& reference,
                                         int order, std::span<const std::int64_t> grid,
                                         std::int64_t min_bucket, const McOptions& mc);
std::vector<LengthBucketKs> ks_by_length(const Corpus& sample, const HeapsFit& ref_fit,
                                         int order, std::span<const std::int64_t> grid,
                                         std::int64_t min_bucket, const McOptions& mc,
                                         RefKind kind);

} // namespace corpusfit
