#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpusfit/corpus.hpp"
#include "corpusfit/random.hpp"

namespace corpusfit {

// Unsmoothed trigram model. Tokens are interned against a lexicographically
// sorted vocabulary; BOS/EOS are sentinel ids that never enter the vocabulary.
struct TrigramModel {
    static constexpr std::int32_t kBos = -1;
    static constexpr std::int32_t kEos = -2;

    std::vector<std::string> vocab; // sorted ascending; id = index

    struct NextCounts {
        std::vector<std::int32_t> tokens; // ascending id, EOS last
        std::vector<std::int64_t> counts;
        std::int64_t total = 0;
    };
    std::unordered_map<std::uint64_t, NextCounts> contexts;

    static std::uint64_t context_key(std::int32_t a, std::int32_t b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    }

    // Id of a vocabulary token, or kEos - 1 when absent.
    std::int32_t token_id(std::string_view token) const;
    bool has_context(std::int32_t a, std::int32_t b) const {
        return contexts.find(context_key(a, b)) != contexts.end();
    }
};

// One conditional distribution p(. | a, b). Tokens keep the model's step
// order: ascending id (= lexicographic), EOS last.
struct CategoricalStep {
    std::vector<std::int32_t> tokens;
    std::vector<double> probs;
};

enum class SamplingScheme { random, nucleus, beam };

SamplingScheme parse_scheme(std::string_view name); // throws usage_error

const char* to_string(SamplingScheme scheme);

struct SamplerConfig {
    SamplingScheme scheme = SamplingScheme::random;
    double nucleus_mass = 0.95; // in (0, 1]
    std::int64_t beam_size = 5;
    std::int64_t max_length = 1024;
    std::uint64_t seed = 1;
};

// Pads each document as (BOS, BOS, tokens..., EOS) and tallies every trigram.
TrigramModel train_trigram(const Corpus& corpus);

// Normalized distribution for an observed context; throws data_error on an
// unseen one (there is no smoothing).
CategoricalStep conditional(const TrigramModel& model, std::int32_t a, std::int32_t b);

// Keeps the smallest descending-probability prefix with mass >= nucleus_mass
// (ties broken lexicographically, EOS last) and renormalizes. mass >= 1
// returns the input unchanged.
CategoricalStep nucleus_truncate(const CategoricalStep& step, double nucleus_mass);

struct SampledDoc {
    Document doc;
    bool truncated = false; // hit max_length before EOS
};

SampledDoc sample_ancestral(const TrigramModel& model, const SamplerConfig& config, Rng& rng);

// Stochastic beam: each live hypothesis samples beam_size extensions, the
// beam_size most probable of the candidates survive; finished hypotheses are
// frozen and compete by cumulative score. Returns the best finished
// hypothesis, falling back to the best unfinished one at max_length.
SampledDoc sample_beam(const TrigramModel& model, const SamplerConfig& config, Rng& rng);

struct GenerationStats {
    std::int64_t truncated = 0;
};

// N documents with per-document rngs derived from (config.seed, index);
// output is a pure function of (model, config, n_docs) for any thread count.
Corpus generate_corpus(const TrigramModel& model, const SamplerConfig& config,
                       std::int64_t n_docs, GenerationStats* stats = nullptr,
                       int threads = 1);

void save_trigram_json(const TrigramModel& model, const std::string& path);
TrigramModel load_trigram_json(const std::string& path);

} // namespace corpusfit
