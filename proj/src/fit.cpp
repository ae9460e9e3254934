#include "corpusfit/fit.hpp"

#include <algorithm>
#include <cmath>

#include "corpusfit/errors.hpp"

namespace corpusfit {

double golden_section_max(double lo, double hi, double tol, double (*f)(double, const void*),
                          const void* ctx) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1, ctx), f2 = f(x2, ctx);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2, ctx);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1, ctx);
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x, ctx);
    // snap to an endpoint when it is at least as good; boundary optima come out exact
    const double flo = f(lo, ctx), fhi = f(hi, ctx);
    if (flo >= fx && flo >= fhi) return lo;
    if (fhi >= fx) return hi;
    return x;
}

double generalized_harmonic(std::int64_t max_rank, double s) {
    double h = 0.0;
    for (std::int64_t k = max_rank; k >= 1; --k)
        h += std::pow(static_cast<double>(k), -s);
    return h;
}

namespace {

struct ZipfData {
    double total = 0.0;
    double count_logrank = 0.0; // sum_k c(w_k) log k
    std::int64_t max_rank = 0;
};

ZipfData zipf_data(const RankFrequencyTable& table) {
    ZipfData d;
    d.total = static_cast<double>(table.total);
    d.max_rank = static_cast<std::int64_t>(table.rows.size());
    for (const auto& row : table.rows)
        d.count_logrank +=
            static_cast<double>(row.count) * std::log(static_cast<double>(row.rank));
    return d;
}

double zipf_loglik_impl(const ZipfData& d, double s) {
    return -d.total * std::log(generalized_harmonic(d.max_rank, s)) - s * d.count_logrank;
}

double zipf_objective(double s, const void* ctx) {
    return zipf_loglik_impl(*static_cast<const ZipfData*>(ctx), s);
}

} // namespace

double zipf_loglik(const RankFrequencyTable& table, double s) {
    if (table.rows.empty()) throw data_error("zipf_loglik: empty table");
    if (s < 0.0) throw usage_error("zipf_loglik: s must be >= 0");
    return zipf_loglik_impl(zipf_data(table), s);
}

ZipfFit fit_zipf_mle(const RankFrequencyTable& table, double s_lo, double s_hi) {
    if (table.rows.empty()) throw data_error("fit_zipf_mle: empty table");
    if (!(s_lo >= 0.0 && s_hi > s_lo)) throw usage_error("fit_zipf_mle: bad bracket");
    const ZipfData data = zipf_data(table);
    ZipfFit fit;
    fit.max_rank = data.max_rank;
    fit.s = golden_section_max(s_lo, s_hi, 1e-7, zipf_objective, &data);
    fit.loglik = zipf_loglik_impl(data, fit.s);
    fit.normalizer = generalized_harmonic(data.max_rank, fit.s);
    if (!std::isfinite(fit.loglik)) throw numerical_error("fit_zipf_mle: non-finite likelihood");
    return fit;
}

ParametricCdf zipf_cdf(const ZipfFit& fit) {
    if (fit.max_rank < 1) throw usage_error("zipf_cdf: invalid fit");
    ParametricCdf cdf;
    cdf.kind = ParametricCdf::Kind::zipf;
    cdf.s = fit.s;
    cdf.support.reserve(static_cast<std::size_t>(fit.max_rank));
    cdf.cum.reserve(static_cast<std::size_t>(fit.max_rank));
    double acc = 0.0;
    for (std::int64_t k = 1; k <= fit.max_rank; ++k) {
        acc += std::pow(static_cast<double>(k), -fit.s);
        cdf.support.push_back(static_cast<double>(k));
        cdf.cum.push_back(acc / fit.normalizer);
    }
    cdf.cum.back() = 1.0;
    return cdf;
}

double heaps_loglik(std::span<const TypeTokenObservation> obs, double alpha, double beta) {
    if (alpha <= 0.0) throw usage_error("heaps_loglik: alpha must be > 0");
    const double log_alpha = std::log(alpha);
    double ll = 0.0;
    for (const auto& o : obs) {
        if (o.length < 1) throw data_error("heaps_loglik: observation with length < 1");
        const double t = static_cast<double>(o.length);
        const double k = static_cast<double>(o.types);
        const double log_t = std::log(t);
        ll += k * (log_alpha + beta * log_t) - std::lgamma(k + 1.0) -
              alpha * std::pow(t, beta);
    }
    return ll;
}

std::pair<double, double> heaps_loglik_grad(std::span<const TypeTokenObservation> obs,
                                            double alpha, double beta) {
    if (alpha <= 0.0) throw usage_error("heaps_loglik_grad: alpha must be > 0");
    double d_alpha = 0.0, d_beta = 0.0;
    for (const auto& o : obs) {
        const double t = static_cast<double>(o.length);
        const double k = static_cast<double>(o.types);
        const double log_t = std::log(t);
        const double rate = std::pow(t, beta);
        d_alpha += k / alpha - rate;
        d_beta += k * log_t - alpha * rate * log_t;
    }
    return {d_alpha, d_beta};
}

namespace {

struct HeapsData {
    std::vector<double> log_lengths;
    double total_types = 0.0;       // sum k_i
    double types_loglen = 0.0;      // sum k_i log t_i
    double log_factorials = 0.0;    // sum log(k_i!)
};

double heaps_profile_loglik(const HeapsData& d, double beta) {
    double sum_rate = 0.0;
    for (double lt : d.log_lengths) sum_rate += std::exp(beta * lt);
    const double alpha = d.total_types / sum_rate;
    return d.total_types * std::log(alpha) + beta * d.types_loglen - d.log_factorials -
           alpha * sum_rate;
}

double heaps_objective(double beta, const void* ctx) {
    return heaps_profile_loglik(*static_cast<const HeapsData*>(ctx), beta);
}

} // namespace

HeapsFit fit_heaps_mle(std::span<const TypeTokenObservation> obs, double beta_lo,
                       double beta_hi) {
    if (obs.size() < 2) throw data_error("fit_heaps_mle: need at least 2 observations");
    HeapsData data;
    data.log_lengths.reserve(obs.size());
    std::int64_t min_len = obs.front().length, max_len = obs.front().length;
    for (const auto& o : obs) {
        if (o.length < 1) throw data_error("fit_heaps_mle: observation with length < 1");
        min_len = std::min(min_len, o.length);
        max_len = std::max(max_len, o.length);
        const double t = static_cast<double>(o.length);
        const double k = static_cast<double>(o.types);
        data.log_lengths.push_back(std::log(t));
        data.total_types += k;
        data.types_loglen += k * std::log(t);
        data.log_factorials += std::lgamma(k + 1.0);
    }
    if (min_len == max_len)
        throw data_error("fit_heaps_mle: underdetermined (all lengths equal)");
    if (data.total_types <= 0.0)
        throw data_error("fit_heaps_mle: no types observed");

    HeapsFit fit;
    fit.n_obs = static_cast<std::int64_t>(obs.size());
    fit.beta = golden_section_max(beta_lo, beta_hi, 1e-7, heaps_objective, &data);
    double sum_rate = 0.0;
    for (double lt : data.log_lengths) sum_rate += std::exp(fit.beta * lt);
    fit.alpha = data.total_types / sum_rate;
    fit.loglik = heaps_profile_loglik(data, fit.beta);
    fit.beta_at_bound = fit.beta >= beta_hi - 1e-6;
    if (!std::isfinite(fit.loglik)) throw numerical_error("fit_heaps_mle: non-finite likelihood");
    return fit;
}

DiscretePmf nhpp_pmf(const HeapsFit& fit, std::int64_t t) {
    if (t < 1) throw usage_error("nhpp_pmf: t must be >= 1");
    const double lambda = fit.alpha * std::pow(static_cast<double>(t), fit.beta);
    DiscretePmf pmf;
    const double log_lambda = std::log(lambda);
    double cum = 0.0;
    // hard cap well past any representable tail
    const std::int64_t cap =
        static_cast<std::int64_t>(lambda + 60.0 * std::sqrt(lambda + 1.0)) + 60;
    for (std::int64_t k = 0; k <= cap; ++k) {
        const double kd = static_cast<double>(k);
        const double p = std::exp(kd * log_lambda - lambda - std::lgamma(kd + 1.0));
        pmf.support.push_back(k);
        pmf.probs.push_back(p);
        cum += p;
        if (kd > lambda && 1.0 - cum < 1e-12) break;
    }
    return pmf;
}

ParametricCdf nhpp_cdf(const HeapsFit& fit, std::int64_t t) {
    const DiscretePmf pmf = nhpp_pmf(fit, t);
    ParametricCdf cdf;
    cdf.kind = ParametricCdf::Kind::nhpp_poisson;
    cdf.alpha = fit.alpha;
    cdf.beta = fit.beta;
    cdf.length = t;
    cdf.support.reserve(pmf.support.size());
    cdf.cum.reserve(pmf.support.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < pmf.support.size(); ++i) {
        acc += pmf.probs[i];
        cdf.support.push_back(static_cast<double>(pmf.support[i]));
        cdf.cum.push_back(acc);
    }
    const double mass = acc;
    for (double& c : cdf.cum) c /= mass;
    cdf.cum.back() = 1.0;
    return cdf;
}

} // namespace corpusfit
