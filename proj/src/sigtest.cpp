#include "corpusfit/sigtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corpusfit/errors.hpp"
#include "corpusfit/parallel.hpp"
#include "corpusfit/random.hpp"

namespace corpusfit {

WeightedSample WeightedSample::from_values(std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    WeightedSample out;
    for (double x : sorted) {
        if (!out.values.empty() && out.values.back() == x) {
            ++out.weights.back();
        } else {
            out.values.push_back(x);
            out.weights.push_back(1);
        }
        ++out.total;
    }
    return out;
}

WeightedSample WeightedSample::from_counts(const std::map<double, std::int64_t>& counts) {
    WeightedSample out;
    for (const auto& [value, count] : counts) {
        if (count <= 0) continue;
        out.values.push_back(value);
        out.weights.push_back(count);
        out.total += count;
    }
    return out;
}

EmpiricalCdf EmpiricalCdf::from_sample(const WeightedSample& sample) {
    if (sample.total <= 0) throw data_error("empirical cdf: empty sample");
    EmpiricalCdf cdf;
    cdf.n = sample.total;
    cdf.support = sample.values;
    cdf.cum.reserve(sample.values.size());
    std::int64_t acc = 0;
    for (std::int64_t w : sample.weights) {
        acc += w;
        cdf.cum.push_back(static_cast<double>(acc) / static_cast<double>(sample.total));
    }
    cdf.cum.back() = 1.0;
    return cdf;
}

WeightedSample rank_weighted_sample(const RankFrequencyTable& table) {
    WeightedSample out;
    out.values.reserve(table.rows.size());
    out.weights.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.values.push_back(static_cast<double>(row.rank));
        out.weights.push_back(row.count);
        out.total += row.count;
    }
    return out;
}

const char* to_string(KsVariant v) {
    return v == KsVariant::one_sample ? "one_sample" : "two_sample";
}

const char* to_string(RefKind k) {
    switch (k) {
        case RefKind::parametric_model: return "D_ptheta";
        case RefKind::parametric_reference: return "D_phat";
        default: return "D_p";
    }
}

namespace {

// sup |F1 - F2| for two right-continuous step functions given as
// (support, cum) pairs. Between jump points the difference is constant, so
// scanning the union of jump points is exact.
double ks_sup(std::span<const double> s1, std::span<const double> c1,
              std::span<const double> s2, std::span<const double> c2) {
    if (s1.empty() || s2.empty()) throw data_error("ks distance: empty support");
    std::size_t i = 0, j = 0;
    double f1 = 0.0, f2 = 0.0, d = 0.0;
    while (i < s1.size() || j < s2.size()) {
        double x;
        if (j >= s2.size() || (i < s1.size() && s1[i] <= s2[j])) {
            x = s1[i];
        } else {
            x = s2[j];
        }
        while (i < s1.size() && s1[i] <= x) f1 = c1[i++];
        while (j < s2.size() && s2[j] <= x) f2 = c2[j++];
        d = std::max(d, std::abs(f1 - f2));
    }
    return d;
}

void check_normalized(const ParametricCdf& ref) {
    if (ref.cum.empty() || std::abs(ref.cum.back() - 1.0) > 1e-9)
        throw data_error("reference cdf is not normalized");
}

double smoothed_p(std::int64_t exceed, std::int64_t iters) {
    return static_cast<double>(exceed + 1) / static_cast<double>(iters + 1);
}

// Splits pooled per-category counts into a size-n subsample by a sequential
// multivariate hypergeometric draw; writes the subsample counts into `out`.
void hypergeometric_split(Rng& rng, std::span<const std::int64_t> pooled, std::int64_t n,
                          std::span<std::int64_t> out) {
    std::int64_t remaining_total = 0;
    for (std::int64_t c : pooled) remaining_total += c;
    std::int64_t remaining_draws = n;
    for (std::size_t j = 0; j < pooled.size(); ++j) {
        if (remaining_draws <= 0) {
            out[j] = 0;
            continue;
        }
        if (remaining_total == pooled[j]) {
            out[j] = remaining_draws; // last non-empty cell takes the rest
            remaining_draws = 0;
            remaining_total = 0;
            continue;
        }
        const std::int64_t h = draw_hypergeometric(rng, remaining_total, pooled[j],
                                                   remaining_draws);
        out[j] = h;
        remaining_draws -= h;
        remaining_total -= pooled[j];
    }
}

} // namespace

double ks_distance(const EmpiricalCdf& f1, const EmpiricalCdf& f2) {
    return ks_sup(f1.support, f1.cum, f2.support, f2.cum);
}

double ks_distance(const EmpiricalCdf& f1, const ParametricCdf& f2) {
    return ks_sup(f1.support, f1.cum, f2.support, f2.cum);
}

KsResult ks_one_sample(const WeightedSample& sample, const ParametricCdf& ref,
                       const McOptions& mc, RefKind kind) {
    if (sample.total <= 0) throw data_error("ks_one_sample: empty sample");
    if (mc.iterations < 100) throw usage_error("ks_one_sample: mc iterations must be >= 100");
    check_normalized(ref);

    KsResult res;
    res.variant = KsVariant::one_sample;
    res.reference_kind = kind;
    res.mc_iterations = mc.iterations;
    res.d = ks_distance(EmpiricalCdf::from_sample(sample), ref);

    // Reference pmf over its own support.
    std::vector<double> q(ref.cum.size());
    std::adjacent_difference(ref.cum.begin(), ref.cum.end(), q.begin());

    const std::int64_t n = sample.total;
    std::vector<std::uint8_t> exceed(static_cast<std::size_t>(mc.iterations), 0);
    parallel_for(mc.iterations, mc.threads, [&](std::int64_t it) {
        Rng rng = make_rng(mc.seed, static_cast<std::uint64_t>(it));
        // Multinomial counts over the reference support via a binomial chain.
        double q_rem = 1.0;
        std::int64_t n_rem = n;
        std::int64_t acc = 0;
        double d = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            std::int64_t c;
            if (j + 1 == q.size()) {
                c = n_rem;
            } else {
                const double p = q_rem > 0.0 ? std::clamp(q[j] / q_rem, 0.0, 1.0) : 1.0;
                c = draw_binomial(rng, n_rem, p);
            }
            n_rem -= c;
            q_rem -= q[j];
            acc += c;
            d = std::max(d, std::abs(static_cast<double>(acc) / static_cast<double>(n) -
                                     ref.cum[j]));
        }
        exceed[static_cast<std::size_t>(it)] = d >= res.d ? 1 : 0;
    });
    std::int64_t count = 0;
    for (auto e : exceed) count += e;
    res.p_value = smoothed_p(count, mc.iterations);
    return res;
}

KsResult ks_two_sample(const WeightedSample& s1, const WeightedSample& s2,
                       const McOptions& mc) {
    if (s1.total <= 0 || s2.total <= 0) throw data_error("ks_two_sample: empty sample");

    KsResult res;
    res.variant = KsVariant::two_sample;
    res.reference_kind = RefKind::empirical;
    res.mc_iterations = mc.iterations;
    res.d = ks_distance(EmpiricalCdf::from_sample(s1), EmpiricalCdf::from_sample(s2));

    // Pool over the union support.
    std::vector<double> support;
    std::vector<std::int64_t> a, b;
    std::size_t i = 0, j = 0;
    while (i < s1.values.size() || j < s2.values.size()) {
        double x;
        if (j >= s2.values.size() ||
            (i < s1.values.size() && s1.values[i] <= s2.values[j])) {
            x = s1.values[i];
        } else {
            x = s2.values[j];
        }
        std::int64_t wa = 0, wb = 0;
        if (i < s1.values.size() && s1.values[i] == x) wa = s1.weights[i++];
        if (j < s2.values.size() && s2.values[j] == x) wb = s2.weights[j++];
        support.push_back(x);
        a.push_back(wa);
        b.push_back(wb);
    }
    std::vector<std::int64_t> pooled(support.size());
    for (std::size_t k = 0; k < support.size(); ++k) pooled[k] = a[k] + b[k];
    const double n = static_cast<double>(s1.total);
    const double m = static_cast<double>(s2.total);

    std::vector<std::uint8_t> exceed(static_cast<std::size_t>(mc.iterations), 0);
    parallel_for(mc.iterations, mc.threads, [&](std::int64_t it) {
        Rng rng = make_rng(mc.seed, static_cast<std::uint64_t>(it));
        std::vector<std::int64_t> split(pooled.size());
        hypergeometric_split(rng, pooled, s1.total, split);
        std::int64_t acc_a = 0, acc_pool = 0;
        double d = 0.0;
        for (std::size_t k = 0; k < pooled.size(); ++k) {
            acc_a += split[k];
            acc_pool += pooled[k];
            const double fa = static_cast<double>(acc_a) / n;
            const double fb = static_cast<double>(acc_pool - acc_a) / m;
            d = std::max(d, std::abs(fa - fb));
        }
        exceed[static_cast<std::size_t>(it)] = d >= res.d ? 1 : 0;
    });
    std::int64_t count = 0;
    for (auto e : exceed) count += e;
    res.p_value = smoothed_p(count, mc.iterations);
    return res;
}

TvdPair tvd(const CategoricalPmf& p1, const CategoricalPmf& p2) {
    TvdPair out;
    double l1 = 0.0;
    auto it1 = p1.probs.begin();
    auto it2 = p2.probs.begin();
    while (it1 != p1.probs.end() || it2 != p2.probs.end()) {
        double a = 0.0, b = 0.0;
        if (it2 == p2.probs.end() || (it1 != p1.probs.end() && it1->first < it2->first)) {
            a = (it1++)->second;
        } else if (it1 == p1.probs.end() || it2->first < it1->first) {
            b = (it2++)->second;
        } else {
            a = (it1++)->second;
            b = (it2++)->second;
        }
        const double diff = std::abs(a - b);
        out.sup = std::max(out.sup, diff);
        l1 += diff;
    }
    out.half_l1 = 0.5 * l1;
    return out;
}

TvdResult tvd_permutation_test(const Vocabulary& s1, const Vocabulary& s2,
                               const McOptions& mc) {
    if (s1.total_tokens <= 0 || s2.total_tokens <= 0)
        throw data_error("tvd_permutation_test: empty sample");
    TvdResult res;
    res.permutations = mc.iterations;
    if (mc.iterations < 100)
        res.warnings.push_back("fewer than 100 permutations; p-value is coarse");

    // Union category counts, ordered by token for determinism.
    std::vector<std::int64_t> a, b;
    {
        auto it1 = s1.entries.begin();
        auto it2 = s2.entries.begin();
        while (it1 != s1.entries.end() || it2 != s2.entries.end()) {
            std::int64_t ca = 0, cb = 0;
            if (it2 == s2.entries.end() ||
                (it1 != s1.entries.end() && it1->first < it2->first)) {
                ca = (it1++)->second;
            } else if (it1 == s1.entries.end() || it2->first < it1->first) {
                cb = (it2++)->second;
            } else {
                ca = (it1++)->second;
                cb = (it2++)->second;
            }
            a.push_back(ca);
            b.push_back(cb);
        }
    }
    const double n = static_cast<double>(s1.total_tokens);
    const double m = static_cast<double>(s2.total_tokens);
    auto tvd_of = [&](std::span<const std::int64_t> ca, std::span<const std::int64_t> cb) {
        double sup = 0.0, l1 = 0.0;
        for (std::size_t k = 0; k < ca.size(); ++k) {
            const double diff = std::abs(static_cast<double>(ca[k]) / n -
                                         static_cast<double>(cb[k]) / m);
            sup = std::max(sup, diff);
            l1 += diff;
        }
        return TvdPair{sup, 0.5 * l1};
    };
    const TvdPair observed = tvd_of(a, b);
    res.tvd_sup = observed.sup;
    res.tvd_l1_half = observed.half_l1;

    std::vector<std::int64_t> pooled(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) pooled[k] = a[k] + b[k];

    std::vector<std::uint8_t> exceed(static_cast<std::size_t>(mc.iterations), 0);
    parallel_for(mc.iterations, mc.threads, [&](std::int64_t it) {
        Rng rng = make_rng(mc.seed, static_cast<std::uint64_t>(it));
        std::vector<std::int64_t> split(pooled.size());
        hypergeometric_split(rng, pooled, s1.total_tokens, split);
        std::vector<std::int64_t> rest(pooled.size());
        for (std::size_t k = 0; k < pooled.size(); ++k) rest[k] = pooled[k] - split[k];
        exceed[static_cast<std::size_t>(it)] = tvd_of(split, rest).sup >= observed.sup ? 1 : 0;
    });
    std::int64_t count = 0;
    for (auto e : exceed) count += e;
    res.p_value = smoothed_p(count, mc.iterations);
    return res;
}

namespace {

// C(n, k) saturating at `cap` to avoid overflow.
std::int64_t binomial_coefficient_capped(std::int64_t n, std::int64_t k, std::int64_t cap) {
    k = std::min(k, n - k);
    if (k < 0) return 0;
    double c = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        c *= static_cast<double>(n - k + i) / static_cast<double>(i);
        if (c > static_cast<double>(cap) * 2.0) return cap + 1;
    }
    return static_cast<std::int64_t>(std::llround(c));
}

} // namespace

PermutationResult mean_diff_permutation_test(std::span<const double> s1,
                                             std::span<const double> s2,
                                             const PermOptions& opts) {
    if (s1.empty() || s2.empty()) throw data_error("permutation test: empty sample");
    const auto n = static_cast<std::int64_t>(s1.size());
    const auto m = static_cast<std::int64_t>(s2.size());
    const auto total = n + m;
    std::vector<double> pool(s1.begin(), s1.end());
    pool.insert(pool.end(), s2.begin(), s2.end());
    double pool_sum = 0.0;
    for (double x : pool) pool_sum += x;

    double sum1 = 0.0, sum2 = 0.0;
    for (double x : s1) sum1 += x;
    for (double x : s2) sum2 += x;

    PermutationResult res;
    res.statistic = sum1 / static_cast<double>(n) - sum2 / static_cast<double>(m);

    auto phi = [&](double sel_sum) {
        return sel_sum / static_cast<double>(n) -
               (pool_sum - sel_sum) / static_cast<double>(m);
    };

    std::vector<double> dist;
    const std::int64_t n_splits = binomial_coefficient_capped(total, n, opts.exhaustive_threshold);
    res.exhaustive = n_splits <= opts.exhaustive_threshold;
    if (res.exhaustive) {
        dist.reserve(static_cast<std::size_t>(n_splits));
        std::vector<std::int64_t> comb(static_cast<std::size_t>(n));
        std::iota(comb.begin(), comb.end(), 0);
        while (true) {
            double sel = 0.0;
            for (std::int64_t idx : comb) sel += pool[static_cast<std::size_t>(idx)];
            dist.push_back(phi(sel));
            // next n-combination of [0, total) in lexicographic order
            std::int64_t i = n - 1;
            while (i >= 0 && comb[static_cast<std::size_t>(i)] == total - n + i) --i;
            if (i < 0) break;
            ++comb[static_cast<std::size_t>(i)];
            for (std::int64_t j = i + 1; j < n; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
        res.permutations = static_cast<std::int64_t>(dist.size());
    } else {
        dist.resize(static_cast<std::size_t>(opts.iterations));
        parallel_for(opts.iterations, opts.threads, [&](std::int64_t it) {
            Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(it));
            std::vector<std::int64_t> idx(static_cast<std::size_t>(total));
            std::iota(idx.begin(), idx.end(), 0);
            double sel = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const auto j = i + static_cast<std::int64_t>(
                                       rng() % static_cast<std::uint64_t>(total - i));
                std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
                sel += pool[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
            }
            dist[static_cast<std::size_t>(it)] = phi(sel);
        });
        res.permutations = opts.iterations;
    }

    double dist_mean = 0.0;
    for (double d : dist) dist_mean += d;
    dist_mean /= static_cast<double>(dist.size());
    res.centered_statistic = res.statistic - dist_mean;

    // Two-tailed on magnitudes. For the mean-difference statistic the
    // exhaustive permutation mean is identically zero, so this coincides with
    // comparing the centered quantities there; it also keeps p == 1 exact for
    // identical samples under Monte Carlo. The comparison carries a
    // scale-relative slack so that splits whose statistic mathematically ties
    // the observed one count as ties regardless of summation order.
    double abs_pool_sum = 0.0;
    for (double x : pool) abs_pool_sum += std::abs(x);
    const double tie_tol = 1e-12 * (abs_pool_sum / static_cast<double>(n) +
                                    abs_pool_sum / static_cast<double>(m));
    const double threshold = std::abs(res.statistic) - tie_tol;
    std::int64_t count = 0;
    for (double d : dist)
        if (std::abs(d) >= threshold) ++count;
    if (res.exhaustive) {
        res.p_value = static_cast<double>(count) / static_cast<double>(dist.size());
    } else {
        res.p_value = smoothed_p(count, res.permutations);
    }
    return res;
}

std::vector<std::int64_t> default_length_grid() {
    std::vector<std::int64_t> grid;
    for (std::int64_t t = 10; t <= 500; t += 10) grid.push_back(t);
    return grid;
}

namespace {

WeightedSample bucket_sample(const std::vector<double>& counts) {
    return WeightedSample::from_values(counts);
}

} // namespace

std::vector<LengthBucketKs> ks_by_length(const Corpus& sample, const Corpus& reference,
                                         int order, std::span<const std::int64_t> grid,
                                         std::int64_t min_bucket, const McOptions& mc) {
    auto sample_buckets = prefix_type_counts(sample, order, grid);
    auto ref_buckets = prefix_type_counts(reference, order, grid);
    std::vector<LengthBucketKs> out;
    for (std::int64_t t : grid) {
        const auto& xs = sample_buckets[t];
        const auto& ys = ref_buckets[t];
        if (xs.empty() && ys.empty()) continue; // beyond both corpora
        LengthBucketKs row;
        row.t = t;
        row.n_sample = static_cast<std::int64_t>(xs.size());
        row.n_reference = static_cast<std::int64_t>(ys.size());
        if (row.n_sample < min_bucket || row.n_reference < min_bucket) {
            row.skipped = true;
        } else {
            McOptions bucket_mc = mc;
            bucket_mc.seed = derive_seed(mc.seed, static_cast<std::uint64_t>(t));
            row.result = ks_two_sample(bucket_sample(xs), bucket_sample(ys), bucket_mc);
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<LengthBucketKs> ks_by_length(const Corpus& sample, const HeapsFit& ref_fit,
                                         int order, std::span<const std::int64_t> grid,
                                         std::int64_t min_bucket, const McOptions& mc,
                                         RefKind kind) {
    auto sample_buckets = prefix_type_counts(sample, order, grid);
    std::vector<LengthBucketKs> out;
    for (std::int64_t t : grid) {
        const auto& xs = sample_buckets[t];
        if (xs.empty()) continue;
        LengthBucketKs row;
        row.t = t;
        row.n_sample = static_cast<std::int64_t>(xs.size());
        row.n_reference = row.n_sample;
        if (row.n_sample < min_bucket) {
            row.skipped = true;
        } else {
            McOptions bucket_mc = mc;
            bucket_mc.seed = derive_seed(mc.seed, static_cast<std::uint64_t>(t));
            row.result = ks_one_sample(bucket_sample(xs), nhpp_cdf(ref_fit, t), bucket_mc, kind);
        }
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace corpusfit
