#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace corpusfit {

inline constexpr const char* kToolVersion = "0.1.0";

struct CommonOptions {
    std::string stopwords_path; // empty = bundled English list
    bool pretokenized = false;
    bool keep_empty = false;
    bool lowercase = true;
    std::int64_t max_rank = 10000;
    int ngram_order = 1;
    std::int64_t mc_iters = 1000;
    std::uint64_t seed = 1;
    int threads = 0; // 0 = hardware concurrency
    std::string out_dir;
    std::string format = "json"; // json | csv
};

struct AnalyzeOptions : CommonOptions {
    std::string input;
    std::int64_t bootstrap = 0; // bootstrap reps for summary-stat sds (0 = off)
};

struct CompareOptions : CommonOptions {
    std::string input;     // candidate corpus
    std::string reference; // reference corpus
    std::int64_t min_bucket = 30;
};

struct SampleOptions {
    std::string model_path; // trained model file; mutually exclusive with train_from
    std::string train_from; // corpus to fit a trigram on first
    std::string save_model;
    std::string out; // generated corpus file; empty = stdout
    std::string scheme = "random";
    std::int64_t n_docs = 1000;
    double nucleus_mass = 0.95;
    std::int64_t beam_size = 5;
    std::int64_t max_length = 1024;
    std::uint64_t seed = 1;
    int threads = 0;
    bool pretokenized = false;
    bool keep_empty = false;
    bool lowercase = true;
};

// Full single-corpus report: summary stats, rank-frequency table, Zipf and
// Heaps fits, length/fraction distributions, type-token curves.
nlohmann::ordered_json run_analyze(const AnalyzeOptions& opts);

// Full candidate-vs-reference battery: rank-frequency D_ptheta/D_phat/D_p,
// unigram TVD + permutation p, length/stopword/symbol KS and mean-difference
// permutation tests, per-length type-token KS.
nlohmann::ordered_json run_compare(const CompareOptions& opts);

// Generates a corpus (writing it to opts.out or stdout) and returns a summary.
nlohmann::ordered_json run_sample(const SampleOptions& opts);

// Flat `test,variant,statistic,p_value,iters,seed` rows (compare) or
// `statistic,value` rows (analyze).
std::string report_to_csv(const nlohmann::ordered_json& report);

void write_file_atomic(const std::string& path, const std::string& content);

} // namespace corpusfit
