#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corpusfit/corpus.hpp"

namespace corpusfit {

struct RankRow {
    std::int64_t rank;  // 1-based, no gaps
    std::string word;
    std::int64_t count; // non-increasing in rank; ties broken lexicographically
};

struct RankFrequencyTable {
    std::vector<RankRow> rows;
    std::int64_t total = 0; // sum of counts over the included rows only
};

// Probability mass function over integer support, sorted ascending.
struct DiscretePmf {
    std::vector<std::int64_t> support;
    std::vector<double> probs;

    double mass() const;
    double mean() const;
};

// Pmf over string categories.
struct CategoricalPmf {
    std::map<std::string, double> probs;
};

struct FractionSample {
    std::vector<double> values; // one per non-empty document, each in [0,1]
    TokenClass cls = TokenClass::stopword;
};

struct TypeTokenObservation {
    std::int64_t length = 0; // t
    std::int64_t types = 0;  // u(y_<=t), distinct n-grams
    std::int32_t order = 1;
};

enum class TypeTokenMode { terminal, prefix };

struct CurvePoint {
    std::int64_t length;
    double mean_types;
};

struct SummaryStats {
    double mean_length = 0.0;
    double mean_stop = 0.0;
    double mean_sym = 0.0;
    std::optional<double> sd_length;
    std::optional<double> sd_stop;
    std::optional<double> sd_sym;
    std::int64_t n_documents = 0;
    std::int64_t bootstrap_reps = 0;
};

// Word counts sorted by (count desc, word asc), truncated to max_rank rows.
RankFrequencyTable rank_frequency(const Corpus& corpus, std::int64_t max_rank);

CategoricalPmf unigram_pmf(const Corpus& corpus);

DiscretePmf length_distribution(const Corpus& corpus);

// Per-document fraction of tokens of the given class; empty documents are
// excluded. Throws data_error when no non-empty document exists.
FractionSample fraction_distribution(const Corpus& corpus, TokenClass cls,
                                     const StopwordSet& stopwords);

// terminal: one (l(y), u(y)) per document; prefix: (t, u(y_<=t)) at every
// prefix length t >= order. Documents shorter than the order emit nothing.
std::vector<TypeTokenObservation> type_token_observations(const Corpus& corpus, int order,
                                                          TypeTokenMode mode);

// Mean u(y_<=t) over all documents with length >= t, for t = 1..max length.
std::vector<CurvePoint> type_token_curve(const Corpus& corpus, int order);

// Distinct-type counts at the given prefix lengths: for each t in grid
// (sorted), the sample of u(y_<=t) over documents with length >= t.
std::map<std::int64_t, std::vector<double>> prefix_type_counts(
    const Corpus& corpus, int order, std::span<const std::int64_t> grid);

// Means of length and class fractions; bootstrap_reps > 0 adds standard
// deviations from resampling documents with replacement.
SummaryStats summary_stats(const Corpus& corpus, const StopwordSet& stopwords,
                           std::int64_t bootstrap_reps = 0, std::uint64_t seed = 1);

} // namespace corpusfit
