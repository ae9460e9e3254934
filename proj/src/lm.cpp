#include "corpusfit/lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "corpusfit/errors.hpp"
#include "corpusfit/parallel.hpp"

namespace corpusfit {

std::int32_t TrigramModel::token_id(std::string_view token) const {
    auto it = std::lower_bound(vocab.begin(), vocab.end(), token);
    if (it == vocab.end() || *it != token) return kEos - 1;
    return static_cast<std::int32_t>(it - vocab.begin());
}

SamplingScheme parse_scheme(std::string_view name) {
    if (name == "random") return SamplingScheme::random;
    if (name == "nucleus") return SamplingScheme::nucleus;
    if (name == "beam") return SamplingScheme::beam;
    throw usage_error("unknown sampling scheme: " + std::string(name));
}

const char* to_string(SamplingScheme scheme) {
    switch (scheme) {
        case SamplingScheme::random: return "random";
        case SamplingScheme::nucleus: return "nucleus";
        default: return "beam";
    }
}

namespace {

// EOS sorts after every real token so that id order matches lexicographic
// order on the step's support.
bool step_less(std::int32_t a, std::int32_t b) {
    const bool ea = a == TrigramModel::kEos, eb = b == TrigramModel::kEos;
    if (ea != eb) return eb;
    return a < b;
}

} // namespace

TrigramModel train_trigram(const Corpus& corpus) {
    if (corpus.documents.empty()) throw data_error("train_trigram: empty corpus");

    // First pass with provisional first-occurrence ids.
    std::unordered_map<std::string, std::int32_t> intern;
    std::vector<const std::string*> by_tmp_id;
    auto tmp_id = [&](const std::string& tok) {
        auto [it, inserted] = intern.emplace(tok, static_cast<std::int32_t>(by_tmp_id.size()));
        if (inserted) by_tmp_id.push_back(&it->first);
        return it->second;
    };
    std::unordered_map<std::uint64_t, std::unordered_map<std::int32_t, std::int64_t>> counts;
    std::vector<std::int32_t> ids;
    for (const auto& doc : corpus.documents) {
        ids.clear();
        ids.push_back(TrigramModel::kBos);
        ids.push_back(TrigramModel::kBos);
        for (const auto& tok : doc.tokens) ids.push_back(tmp_id(tok));
        ids.push_back(TrigramModel::kEos);
        for (std::size_t i = 2; i < ids.size(); ++i)
            ++counts[TrigramModel::context_key(ids[i - 2], ids[i - 1])][ids[i]];
    }

    // Remap onto the sorted vocabulary.
    TrigramModel model;
    model.vocab.reserve(by_tmp_id.size());
    for (const auto* tok : by_tmp_id) model.vocab.push_back(*tok);
    std::sort(model.vocab.begin(), model.vocab.end());
    std::vector<std::int32_t> remap(by_tmp_id.size());
    for (std::size_t tmp = 0; tmp < by_tmp_id.size(); ++tmp)
        remap[tmp] = model.token_id(*by_tmp_id[tmp]);
    auto final_id = [&](std::int32_t id) {
        return id < 0 ? id : remap[static_cast<std::size_t>(id)];
    };

    model.contexts.reserve(counts.size());
    for (const auto& [key, next] : counts) {
        const auto a = static_cast<std::int32_t>(key >> 32);
        const auto b = static_cast<std::int32_t>(key & 0xFFFFFFFFu);
        TrigramModel::NextCounts out;
        out.tokens.reserve(next.size());
        std::vector<std::pair<std::int32_t, std::int64_t>> rows;
        rows.reserve(next.size());
        for (const auto& [tok, c] : next) rows.emplace_back(final_id(tok), c);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& x, const auto& y) { return step_less(x.first, y.first); });
        for (const auto& [tok, c] : rows) {
            out.tokens.push_back(tok);
            out.counts.push_back(c);
            out.total += c;
        }
        model.contexts.emplace(TrigramModel::context_key(final_id(a), final_id(b)),
                               std::move(out));
    }
    return model;
}

CategoricalStep conditional(const TrigramModel& model, std::int32_t a, std::int32_t b) {
    auto it = model.contexts.find(TrigramModel::context_key(a, b));
    if (it == model.contexts.end()) throw data_error("conditional: unseen context");
    const auto& next = it->second;
    CategoricalStep step;
    step.tokens = next.tokens;
    step.probs.reserve(next.counts.size());
    const double total = static_cast<double>(next.total);
    for (std::int64_t c : next.counts) step.probs.push_back(static_cast<double>(c) / total);
    return step;
}

CategoricalStep nucleus_truncate(const CategoricalStep& step, double nucleus_mass) {
    if (nucleus_mass <= 0.0 || nucleus_mass > 1.0)
        throw usage_error("nucleus mass must be in (0, 1]");
    if (nucleus_mass >= 1.0) return step;

    std::vector<std::size_t> order(step.tokens.size());
    std::iota(order.begin(), order.end(), 0);
    // Descending probability; ties keep step order (lexicographic, EOS last).
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return step.probs[i] > step.probs[j];
    });

    std::vector<bool> keep(step.tokens.size(), false);
    double cum = 0.0;
    for (std::size_t i : order) {
        keep[i] = true;
        cum += step.probs[i];
        if (cum >= nucleus_mass) break;
    }
    CategoricalStep out;
    double z = 0.0;
    for (std::size_t i = 0; i < step.tokens.size(); ++i)
        if (keep[i]) z += step.probs[i];
    for (std::size_t i = 0; i < step.tokens.size(); ++i) {
        if (!keep[i]) continue;
        out.tokens.push_back(step.tokens[i]);
        out.probs.push_back(step.probs[i] / z);
    }
    return out;
}

SampledDoc sample_ancestral(const TrigramModel& model, const SamplerConfig& config, Rng& rng) {
    SampledDoc out;
    std::int32_t a = TrigramModel::kBos, b = TrigramModel::kBos;
    for (std::int64_t step_no = 0; step_no < config.max_length; ++step_no) {
        CategoricalStep step = conditional(model, a, b);
        if (config.scheme == SamplingScheme::nucleus)
            step = nucleus_truncate(step, config.nucleus_mass);
        const auto idx = static_cast<std::size_t>(draw_categorical(rng, step.probs));
        const std::int32_t tok = step.tokens[idx];
        if (tok == TrigramModel::kEos) return out;
        out.doc.tokens.push_back(model.vocab[static_cast<std::size_t>(tok)]);
        a = b;
        b = tok;
    }
    out.truncated = true;
    return out;
}

namespace {

struct Hypothesis {
    std::vector<std::int32_t> tokens;
    double logp = 0.0;
    bool done = false;
};

bool same_state(const Hypothesis& x, const Hypothesis& y) {
    return x.done == y.done && x.tokens == y.tokens;
}

bool state_less(const Hypothesis& x, const Hypothesis& y) {
    if (x.tokens != y.tokens) return x.tokens < y.tokens;
    return x.done < y.done;
}

bool score_less(const Hypothesis& x, const Hypothesis& y) {
    if (x.logp != y.logp) return x.logp > y.logp; // higher score first
    if (x.tokens != y.tokens) return x.tokens < y.tokens;
    return x.done > y.done;
}

} // namespace

SampledDoc sample_beam(const TrigramModel& model, const SamplerConfig& config, Rng& rng) {
    if (config.beam_size < 1) throw usage_error("beam size must be >= 1");
    const auto k = static_cast<std::size_t>(config.beam_size);
    std::vector<Hypothesis> beam(k);

    for (std::int64_t step_no = 0; step_no < config.max_length; ++step_no) {
        bool any_live = false;
        for (const auto& hyp : beam)
            if (!hyp.done) any_live = true;
        if (!any_live) break;

        std::vector<Hypothesis> candidates;
        candidates.reserve(k * (k + 1));
        for (const auto& hyp : beam) {
            if (hyp.done) {
                candidates.push_back(hyp);
                continue;
            }
            const std::int32_t a = hyp.tokens.size() >= 2
                                       ? hyp.tokens[hyp.tokens.size() - 2]
                                       : TrigramModel::kBos;
            const std::int32_t b =
                hyp.tokens.empty() ? TrigramModel::kBos : hyp.tokens.back();
            const CategoricalStep step = conditional(model, a, b);
            for (std::size_t e = 0; e < k; ++e) {
                const auto idx = static_cast<std::size_t>(draw_categorical(rng, step.probs));
                Hypothesis cand = hyp;
                cand.logp += std::log(step.probs[idx]);
                if (step.tokens[idx] == TrigramModel::kEos) {
                    cand.done = true;
                } else {
                    cand.tokens.push_back(step.tokens[idx]);
                }
                candidates.push_back(std::move(cand));
            }
        }
        // Identical sampled extensions carry identical scores; keep one copy.
        std::sort(candidates.begin(), candidates.end(), state_less);
        candidates.erase(std::unique(candidates.begin(), candidates.end(), same_state),
                         candidates.end());
        std::sort(candidates.begin(), candidates.end(), score_less);
        if (candidates.size() > k) candidates.resize(k);
        beam = std::move(candidates);
    }

    const Hypothesis* chosen = nullptr;
    for (const auto& hyp : beam) {
        if (hyp.done) { // beam is score-sorted; first finished is the best one
            chosen = &hyp;
            break;
        }
    }
    if (chosen == nullptr) chosen = &beam.front();

    SampledDoc out;
    out.truncated = !chosen->done;
    out.doc.tokens.reserve(chosen->tokens.size());
    for (std::int32_t tok : chosen->tokens)
        out.doc.tokens.push_back(model.vocab[static_cast<std::size_t>(tok)]);
    return out;
}

Corpus generate_corpus(const TrigramModel& model, const SamplerConfig& config,
                       std::int64_t n_docs, GenerationStats* stats, int threads) {
    if (n_docs < 1) throw usage_error("generate_corpus: need at least one document");
    std::vector<SampledDoc> slots(static_cast<std::size_t>(n_docs));
    parallel_for(n_docs, threads, [&](std::int64_t i) {
        Rng rng = make_rng(config.seed, static_cast<std::uint64_t>(i));
        slots[static_cast<std::size_t>(i)] = config.scheme == SamplingScheme::beam
                                                 ? sample_beam(model, config, rng)
                                                 : sample_ancestral(model, config, rng);
    });
    Corpus corpus;
    corpus.source_label = "generated";
    corpus.documents.reserve(slots.size());
    std::int64_t truncated = 0;
    for (auto& slot : slots) {
        truncated += slot.truncated ? 1 : 0;
        corpus.documents.push_back(std::move(slot.doc));
    }
    if (stats != nullptr) stats->truncated = truncated;
    return corpus;
}

void save_trigram_json(const TrigramModel& model, const std::string& path) {
    nlohmann::ordered_json j;
    j["format"] = "corpusfit-trigram";
    j["version"] = 1;
    j["vocab"] = model.vocab;

    std::vector<std::uint64_t> keys;
    keys.reserve(model.contexts.size());
    for (const auto& [key, next] : model.contexts) keys.push_back(key);
    std::sort(keys.begin(), keys.end(), [](std::uint64_t x, std::uint64_t y) {
        const auto ax = static_cast<std::int32_t>(x >> 32);
        const auto ay = static_cast<std::int32_t>(y >> 32);
        if (ax != ay) return ax < ay;
        return static_cast<std::int32_t>(x & 0xFFFFFFFFu) <
               static_cast<std::int32_t>(y & 0xFFFFFFFFu);
    });
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::uint64_t key : keys) {
        const auto& next = model.contexts.at(key);
        const auto a = static_cast<std::int32_t>(key >> 32);
        const auto b = static_cast<std::int32_t>(key & 0xFFFFFFFFu);
        for (std::size_t i = 0; i < next.tokens.size(); ++i)
            rows.push_back({a, b, next.tokens[i], next.counts[i]});
    }
    j["trigrams"] = std::move(rows);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write model file: " + path);
    out << j.dump() << "\n";
}

TrigramModel load_trigram_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("invalid model file " + path + ": " + e.what());
    }
    if (j.value("format", "") != "corpusfit-trigram" || j.value("version", 0) != 1)
        throw data_error("not a corpusfit trigram model: " + path);

    TrigramModel model;
    model.vocab = j.at("vocab").get<std::vector<std::string>>();
    if (!std::is_sorted(model.vocab.begin(), model.vocab.end()))
        throw data_error("model vocabulary is not sorted: " + path);
    const auto vocab_size = static_cast<std::int64_t>(model.vocab.size());

    auto valid_id = [&](std::int64_t id, bool allow_bos) {
        if (id == TrigramModel::kEos) return true;
        if (id == TrigramModel::kBos) return allow_bos;
        return id >= 0 && id < vocab_size;
    };
    for (const auto& row : j.at("trigrams")) {
        if (!row.is_array() || row.size() != 4) throw data_error("bad trigram row in " + path);
        const std::int64_t a = row[0], b = row[1], x = row[2], c = row[3];
        if (!valid_id(a, true) || !valid_id(b, true) || !valid_id(x, false) || c < 1 ||
            a == TrigramModel::kEos || b == TrigramModel::kEos)
            throw data_error("bad trigram row in " + path);
        auto& next = model.contexts[TrigramModel::context_key(static_cast<std::int32_t>(a),
                                                              static_cast<std::int32_t>(b))];
        next.tokens.push_back(static_cast<std::int32_t>(x));
        next.counts.push_back(c);
        next.total += c;
    }
    for (auto& [key, next] : model.contexts) {
        std::vector<std::size_t> order(next.tokens.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j2) {
            return step_less(next.tokens[i], next.tokens[j2]);
        });
        TrigramModel::NextCounts sorted;
        sorted.total = next.total;
        for (std::size_t i : order) {
            sorted.tokens.push_back(next.tokens[i]);
            sorted.counts.push_back(next.counts[i]);
        }
        next = std::move(sorted);
    }
    return model;
}

} // namespace corpusfit
