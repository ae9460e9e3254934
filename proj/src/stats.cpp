#include "corpusfit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "corpusfit/errors.hpp"
#include "corpusfit/random.hpp"

namespace corpusfit {

double DiscretePmf::mass() const {
    double m = 0.0;
    for (double p : probs) m += p;
    return m;
}

double DiscretePmf::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        m += static_cast<double>(support[i]) * probs[i];
    return m;
}

RankFrequencyTable rank_frequency(const Corpus& corpus, std::int64_t max_rank) {
    if (max_rank < 1) throw usage_error("max_rank must be >= 1");
    Vocabulary vocab = vocabulary(corpus);
    if (vocab.entries.empty()) throw data_error("rank_frequency: empty corpus");
    std::vector<std::pair<std::string, std::int64_t>> items(vocab.entries.begin(),
                                                            vocab.entries.end());
    // entries are already word-sorted; stable sort by count keeps ties lexicographic
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    RankFrequencyTable table;
    const auto keep = std::min<std::int64_t>(max_rank, static_cast<std::int64_t>(items.size()));
    table.rows.reserve(static_cast<std::size_t>(keep));
    for (std::int64_t k = 0; k < keep; ++k) {
        auto& [word, count] = items[static_cast<std::size_t>(k)];
        table.rows.push_back({k + 1, std::move(word), count});
        table.total += count;
    }
    return table;
}

CategoricalPmf unigram_pmf(const Corpus& corpus) {
    Vocabulary vocab = vocabulary(corpus);
    if (vocab.total_tokens == 0) throw data_error("unigram_pmf: empty corpus");
    CategoricalPmf pmf;
    const double total = static_cast<double>(vocab.total_tokens);
    for (const auto& [word, count] : vocab.entries)
        pmf.probs.emplace(word, static_cast<double>(count) / total);
    return pmf;
}

DiscretePmf length_distribution(const Corpus& corpus) {
    if (corpus.documents.empty()) throw data_error("length_distribution: empty corpus");
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto& doc : corpus.documents) ++counts[doc.length()];
    DiscretePmf pmf;
    const double total = static_cast<double>(corpus.size());
    for (const auto& [len, count] : counts) {
        pmf.support.push_back(len);
        pmf.probs.push_back(static_cast<double>(count) / total);
    }
    return pmf;
}

namespace {

double class_fraction(const Document& doc, TokenClass cls, const StopwordSet& stopwords) {
    std::int64_t hits = 0;
    for (const auto& tok : doc.tokens)
        if (classify_token(tok, stopwords) == cls) ++hits;
    return static_cast<double>(hits) / static_cast<double>(doc.length());
}

} // namespace

FractionSample fraction_distribution(const Corpus& corpus, TokenClass cls,
                                     const StopwordSet& stopwords) {
    FractionSample sample;
    sample.cls = cls;
    for (const auto& doc : corpus.documents) {
        if (doc.length() == 0) continue;
        sample.values.push_back(class_fraction(doc, cls, stopwords));
    }
    if (sample.values.empty())
        throw data_error("fraction_distribution: no non-empty documents");
    return sample;
}

namespace {

// Visits (t, u(y_<=t)) for t = 1..l(y). For order 2 the bigram key joins the
// two tokens with a space, which cannot occur inside a token.
template <typename Visit>
void walk_prefix_types(const Document& doc, int order, Visit&& visit) {
    std::unordered_set<std::string> seen;
    const auto n = doc.tokens.size();
    for (std::size_t t = 1; t <= n; ++t) {
        if (static_cast<int>(t) >= order) {
            if (order == 1) {
                seen.insert(doc.tokens[t - 1]);
            } else {
                seen.insert(doc.tokens[t - 2] + " " + doc.tokens[t - 1]);
            }
        }
        visit(static_cast<std::int64_t>(t), static_cast<std::int64_t>(seen.size()));
    }
}

} // namespace

std::vector<TypeTokenObservation> type_token_observations(const Corpus& corpus, int order,
                                                          TypeTokenMode mode) {
    if (order != 1 && order != 2) throw usage_error("ngram order must be 1 or 2");
    std::vector<TypeTokenObservation> obs;
    for (const auto& doc : corpus.documents) {
        if (doc.length() < order) continue;
        if (mode == TypeTokenMode::terminal) {
            std::int64_t final_types = 0;
            walk_prefix_types(doc, order,
                              [&](std::int64_t, std::int64_t k) { final_types = k; });
            obs.push_back({doc.length(), final_types, order});
        } else {
            walk_prefix_types(doc, order, [&](std::int64_t t, std::int64_t k) {
                if (t >= order) obs.push_back({t, k, order});
            });
        }
    }
    return obs;
}

std::vector<CurvePoint> type_token_curve(const Corpus& corpus, int order) {
    if (order != 1 && order != 2) throw usage_error("ngram order must be 1 or 2");
    std::int64_t max_len = 0;
    for (const auto& doc : corpus.documents) max_len = std::max(max_len, doc.length());
    std::vector<double> sums(static_cast<std::size_t>(max_len) + 1, 0.0);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(max_len) + 1, 0);
    for (const auto& doc : corpus.documents) {
        walk_prefix_types(doc, order, [&](std::int64_t t, std::int64_t k) {
            sums[static_cast<std::size_t>(t)] += static_cast<double>(k);
            ++counts[static_cast<std::size_t>(t)];
        });
    }
    std::vector<CurvePoint> curve;
    for (std::int64_t t = 1; t <= max_len; ++t) {
        const auto i = static_cast<std::size_t>(t);
        if (counts[i] > 0)
            curve.push_back({t, sums[i] / static_cast<double>(counts[i])});
    }
    return curve;
}

std::map<std::int64_t, std::vector<double>> prefix_type_counts(
    const Corpus& corpus, int order, std::span<const std::int64_t> grid) {
    std::map<std::int64_t, std::vector<double>> buckets;
    for (std::int64_t t : grid) buckets.emplace(t, std::vector<double>{});
    for (const auto& doc : corpus.documents) {
        walk_prefix_types(doc, order, [&](std::int64_t t, std::int64_t k) {
            auto it = buckets.find(t);
            if (it != buckets.end()) it->second.push_back(static_cast<double>(k));
        });
    }
    return buckets;
}

namespace {

struct MeanAccumulator {
    double length = 0.0, stop = 0.0, sym = 0.0;
    std::int64_t docs = 0, non_empty = 0;

    void add(const Document& doc, const StopwordSet& stopwords) {
        length += static_cast<double>(doc.length());
        ++docs;
        if (doc.length() == 0) return;
        ++non_empty;
        std::int64_t stops = 0, syms = 0;
        for (const auto& tok : doc.tokens) {
            switch (classify_token(tok, stopwords)) {
                case TokenClass::stopword: ++stops; break;
                case TokenClass::symbol: ++syms; break;
                default: break;
            }
        }
        stop += static_cast<double>(stops) / static_cast<double>(doc.length());
        sym += static_cast<double>(syms) / static_cast<double>(doc.length());
    }

    double mean_length() const { return length / static_cast<double>(docs); }
    double mean_stop() const { return stop / static_cast<double>(non_empty); }
    double mean_sym() const { return sym / static_cast<double>(non_empty); }
};

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

} // namespace

SummaryStats summary_stats(const Corpus& corpus, const StopwordSet& stopwords,
                           std::int64_t bootstrap_reps, std::uint64_t seed) {
    if (corpus.documents.empty()) throw data_error("summary_stats: empty corpus");
    MeanAccumulator acc;
    for (const auto& doc : corpus.documents) acc.add(doc, stopwords);
    if (acc.non_empty == 0) throw data_error("summary_stats: all documents empty");

    SummaryStats out;
    out.mean_length = acc.mean_length();
    out.mean_stop = acc.mean_stop();
    out.mean_sym = acc.mean_sym();
    out.n_documents = corpus.size();
    out.bootstrap_reps = bootstrap_reps;

    if (bootstrap_reps > 0) {
        const auto n = corpus.documents.size();
        std::vector<double> bl, bs, by;
        bl.reserve(static_cast<std::size_t>(bootstrap_reps));
        for (std::int64_t rep = 0; rep < bootstrap_reps; ++rep) {
            Rng rng = make_rng(seed, static_cast<std::uint64_t>(rep));
            MeanAccumulator boot;
            for (std::size_t j = 0; j < n; ++j) {
                const auto pick = static_cast<std::size_t>(rng() % n);
                boot.add(corpus.documents[pick], stopwords);
            }
            if (boot.non_empty == 0) continue;
            bl.push_back(boot.mean_length());
            bs.push_back(boot.mean_stop());
            by.push_back(boot.mean_sym());
        }
        out.sd_length = sample_sd(bl);
        out.sd_stop = sample_sd(bs);
        out.sd_sym = sample_sd(by);
    }
    return out;
}

} // namespace corpusfit
