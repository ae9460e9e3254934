#include "corpusfit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "corpusfit/errors.hpp"
#include "corpusfit/fit.hpp"
#include "corpusfit/lm.hpp"
#include "corpusfit/sigtest.hpp"
#include "corpusfit/stats.hpp"

namespace corpusfit {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write file: " + tmp);
        out << content;
        if (!out) throw data_error("write failed: " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw data_error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

namespace {

StopwordSet load_stopwords(const CommonOptions& opts) {
    if (opts.stopwords_path.empty()) return StopwordSet::english();
    return StopwordSet::from_file(opts.stopwords_path);
}

Corpus load_input(const std::string& path, const CommonOptions& opts,
                  const char* role) {
    IngestOptions ingest;
    ingest.tokenizer.lowercase = opts.lowercase;
    ingest.tokenizer.pretokenized = opts.pretokenized;
    ingest.keep_empty = opts.keep_empty;
    Corpus corpus = load_corpus(path, ingest);
    if (corpus.documents.empty())
        throw data_error(std::string(role) + " corpus is empty: " + path);
    return corpus;
}

json corpus_info(const Corpus& corpus, const std::string& path) {
    const Vocabulary vocab = vocabulary(corpus);
    json j;
    j["path"] = path;
    j["documents"] = corpus.size();
    j["total_tokens"] = vocab.total_tokens;
    j["vocab_size"] = static_cast<std::int64_t>(vocab.entries.size());
    return j;
}

json zipf_fit_json(const ZipfFit& fit) {
    json j;
    j["law"] = "zipf";
    j["s"] = fit.s;
    j["loglik"] = fit.loglik;
    j["max_rank"] = fit.max_rank;
    j["normalizer"] = fit.normalizer;
    return j;
}

json heaps_fit_json(const HeapsFit& fit) {
    json j;
    j["law"] = "heaps-nhpp";
    j["alpha"] = fit.alpha;
    j["beta"] = fit.beta;
    j["loglik"] = fit.loglik;
    j["n_obs"] = fit.n_obs;
    j["observations"] = "terminal"; // one (length, types) pair per document
    if (fit.beta_at_bound) j["warning"] = "beta hit the search bound";
    return j;
}

json ks_json(const KsResult& r, std::uint64_t seed) {
    json j;
    j["variant"] = to_string(r.variant);
    j["reference"] = to_string(r.reference_kind);
    j["d"] = r.d;
    j["p_value"] = r.p_value;
    j["mc_iterations"] = r.mc_iterations;
    j["seed"] = seed;
    return j;
}

json perm_json(const PermutationResult& r, std::uint64_t seed) {
    json j;
    j["statistic"] = r.statistic;
    j["centered_statistic"] = r.centered_statistic;
    j["p_value"] = r.p_value;
    j["permutations"] = r.permutations;
    j["exhaustive"] = r.exhaustive;
    j["seed"] = seed;
    return j;
}

std::string format_fraction_bin(int bin) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", static_cast<double>(bin) / 100.0);
    return buf;
}

json fraction_histogram(const FractionSample& sample) {
    // delta = 0.01 bins over [0,1]; fractions of exactly 1 land in the top bin
    std::array<std::int64_t, 100> bins{};
    for (double v : sample.values) {
        int b = static_cast<int>(v * 100.0);
        b = std::clamp(b, 0, 99);
        ++bins[static_cast<std::size_t>(b)];
    }
    json j;
    const double total = static_cast<double>(sample.values.size());
    for (int b = 0; b < 100; ++b) {
        if (bins[static_cast<std::size_t>(b)] == 0) continue;
        j[format_fraction_bin(b)] =
            static_cast<double>(bins[static_cast<std::size_t>(b)]) / total;
    }
    return j;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
    std::ostringstream out;
    out << "t,mean_types\n";
    for (const auto& pt : curve) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%lld,%.17g\n",
                      static_cast<long long>(pt.length), pt.mean_types);
        out << buf;
    }
    return out.str();
}

std::string rank_table_csv(const RankFrequencyTable& table) {
    std::ostringstream out;
    out << "rank,word,count\n";
    for (const auto& row : table.rows) {
        std::string word = row.word;
        // CSV-quote words containing the delimiter or quotes
        if (word.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (char c : word) {
                if (c == '"') quoted += '"';
                quoted += c;
            }
            quoted += '"';
            word = quoted;
        }
        out << row.rank << ',' << word << ',' << row.count << '\n';
    }
    return out.str();
}

std::string buckets_csv(const std::vector<LengthBucketKs>& rows) {
    std::ostringstream out;
    out << "t,D,p\n";
    for (const auto& row : rows) {
        if (row.skipped) {
            out << row.t << ",,\n";
        } else {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                          static_cast<long long>(row.t), row.result.d, row.result.p_value);
            out << buf;
        }
    }
    return out.str();
}

json buckets_json(const std::vector<LengthBucketKs>& rows, std::uint64_t seed) {
    json arr = json::array();
    for (const auto& row : rows) {
        json r;
        r["t"] = row.t;
        r["n_sample"] = row.n_sample;
        r["n_reference"] = row.n_reference;
        if (row.skipped) {
            r["skipped"] = true;
        } else {
            r["d"] = row.result.d;
            r["p_value"] = row.result.p_value;
            r["mc_iterations"] = row.result.mc_iterations;
        }
        arr.push_back(std::move(r));
    }
    json j;
    j["seed"] = seed;
    j["buckets"] = std::move(arr);
    return j;
}

json echo_common(const CommonOptions& opts) {
    json j;
    j["stopwords"] = opts.stopwords_path.empty() ? "builtin:english" : opts.stopwords_path;
    j["pretokenized"] = opts.pretokenized;
    j["keep_empty"] = opts.keep_empty;
    j["lowercase"] = opts.lowercase;
    j["max_rank"] = opts.max_rank;
    j["ngram_order"] = opts.ngram_order;
    j["mc_iters"] = opts.mc_iters;
    j["seed"] = opts.seed;
    return j;
}

// Wraps a section computation so failures name the section they came from.
template <typename Fn>
auto section(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const data_error& e) {
        throw data_error(std::string("[section ") + name + "] " + e.what());
    }
}

void maybe_write(const CommonOptions& opts, json& files, const std::string& name,
                 const std::string& content) {
    if (opts.out_dir.empty()) return;
    fs::create_directories(opts.out_dir);
    const std::string path = (fs::path(opts.out_dir) / name).string();
    write_file_atomic(path, content);
    files[name] = path;
}

std::vector<double> length_sample(const Corpus& corpus) {
    std::vector<double> lengths;
    lengths.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents)
        lengths.push_back(static_cast<double>(doc.length()));
    return lengths;
}

} // namespace

json run_analyze(const AnalyzeOptions& opts) {
    const StopwordSet stopwords = load_stopwords(opts);
    const Corpus corpus = load_input(opts.input, opts, "input");

    json report;
    report["tool"] = "corpusfit";
    report["version"] = kToolVersion;
    report["command"] = "analyze";
    json config = echo_common(opts);
    config["input"] = opts.input;
    config["bootstrap"] = opts.bootstrap;
    report["config"] = std::move(config);
    report["corpus"] = corpus_info(corpus, opts.input);

    const SummaryStats summary = section("summary", [&] {
        return summary_stats(corpus, stopwords, opts.bootstrap, opts.seed);
    });
    {
        json j;
        j["mean_length"] = summary.mean_length;
        j["mean_stopword_fraction"] = summary.mean_stop;
        j["mean_symbol_fraction"] = summary.mean_sym;
        if (summary.sd_length) {
            j["sd_length"] = *summary.sd_length;
            j["sd_stopword_fraction"] = *summary.sd_stop;
            j["sd_symbol_fraction"] = *summary.sd_sym;
            j["bootstrap_reps"] = summary.bootstrap_reps;
        }
        report["summary"] = std::move(j);
    }

    const RankFrequencyTable table =
        section("rank_frequency", [&] { return rank_frequency(corpus, opts.max_rank); });
    const ZipfFit zipf = section("zipf", [&] { return fit_zipf_mle(table); });
    report["zipf"] = zipf_fit_json(zipf);

    json heaps;
    for (int order : {1, 2}) {
        const char* key = order == 1 ? "unigram" : "bigram";
        heaps[key] = section("heaps", [&]() -> json {
            const auto obs = type_token_observations(corpus, order, TypeTokenMode::terminal);
            return heaps_fit_json(fit_heaps_mle(obs));
        });
    }
    report["heaps"] = std::move(heaps);

    {
        const DiscretePmf lengths =
            section("length_distribution", [&] { return length_distribution(corpus); });
        json j;
        for (std::size_t i = 0; i < lengths.support.size(); ++i)
            j[std::to_string(lengths.support[i])] = lengths.probs[i];
        report["length_distribution"] = std::move(j);
    }
    report["stopword_fraction_histogram"] = section("stopword_fraction", [&] {
        return fraction_histogram(fraction_distribution(corpus, TokenClass::stopword, stopwords));
    });
    report["symbol_fraction_histogram"] = section("symbol_fraction", [&] {
        return fraction_histogram(fraction_distribution(corpus, TokenClass::symbol, stopwords));
    });

    // Curve values at t average only documents that are at least t long;
    // short documents drop out of the long-t means.
    report["type_token_curve_convention"] = "mean over documents with length >= t";

    json files = json::object();
    maybe_write(opts, files, "rank_frequency.csv", rank_table_csv(table));
    maybe_write(opts, files, "type_token_unigram.csv", curve_csv(type_token_curve(corpus, 1)));
    maybe_write(opts, files, "type_token_bigram.csv", curve_csv(type_token_curve(corpus, 2)));
    report["files"] = std::move(files);
    if (!opts.out_dir.empty()) {
        const std::string path = (fs::path(opts.out_dir) / "report.json").string();
        write_file_atomic(path, report.dump(2) + "\n");
        report["files"]["report.json"] = path;
    }
    return report;
}

json run_compare(const CompareOptions& opts) {
    const StopwordSet stopwords = load_stopwords(opts);
    const Corpus candidate = load_input(opts.input, opts, "candidate");
    const Corpus reference = load_input(opts.reference, opts, "reference");

    json report;
    report["tool"] = "corpusfit";
    report["version"] = kToolVersion;
    report["command"] = "compare";
    json config = echo_common(opts);
    config["input"] = opts.input;
    config["reference"] = opts.reference;
    config["min_bucket"] = opts.min_bucket;
    report["config"] = std::move(config);
    report["candidate"] = corpus_info(candidate, opts.input);
    report["reference"] = corpus_info(reference, opts.reference);

    auto mc_for = [&](std::uint64_t section_index) {
        McOptions mc;
        mc.iterations = opts.mc_iters;
        mc.seed = derive_seed(opts.seed, section_index);
        mc.threads = opts.threads;
        return mc;
    };

    // Rank-frequency: weighted cdfs over occurrences of the first max_rank ranks.
    const RankFrequencyTable cand_table = section(
        "rank_frequency", [&] { return rank_frequency(candidate, opts.max_rank); });
    const RankFrequencyTable ref_table = section(
        "rank_frequency", [&] { return rank_frequency(reference, opts.max_rank); });
    const ZipfFit zipf_cand = section("zipf", [&] { return fit_zipf_mle(cand_table); });
    const ZipfFit zipf_ref = section("zipf", [&] { return fit_zipf_mle(ref_table); });
    {
        json fits;
        fits["zipf_candidate"] = zipf_fit_json(zipf_cand);
        fits["zipf_reference"] = zipf_fit_json(zipf_ref);
        report["fits"] = std::move(fits);
    }
    {
        const WeightedSample cand_sample = rank_weighted_sample(cand_table);
        const WeightedSample ref_sample = rank_weighted_sample(ref_table);
        json j;
        const auto mc1 = mc_for(1);
        j["D_ptheta"] = ks_json(
            section("rank_frequency/D_ptheta",
                    [&] {
                        return ks_one_sample(cand_sample, zipf_cdf(zipf_cand), mc1,
                                             RefKind::parametric_model);
                    }),
            mc1.seed);
        const auto mc2 = mc_for(2);
        j["D_phat"] = ks_json(
            section("rank_frequency/D_phat",
                    [&] {
                        return ks_one_sample(cand_sample, zipf_cdf(zipf_ref), mc2,
                                             RefKind::parametric_reference);
                    }),
            mc2.seed);
        const auto mc3 = mc_for(3);
        j["D_p"] = ks_json(
            section("rank_frequency/D_p",
                    [&] { return ks_two_sample(cand_sample, ref_sample, mc3); }),
            mc3.seed);
        report["rank_frequency"] = std::move(j);
    }

    {
        const auto mc = mc_for(4);
        const TvdResult tvd_res = section("unigram", [&] {
            return tvd_permutation_test(vocabulary(candidate), vocabulary(reference), mc);
        });
        json j;
        j["tvd_sup"] = tvd_res.tvd_sup;
        j["tvd_l1_half"] = tvd_res.tvd_l1_half;
        j["p_value"] = tvd_res.p_value;
        j["permutations"] = tvd_res.permutations;
        j["seed"] = mc.seed;
        if (!tvd_res.warnings.empty()) j["warnings"] = tvd_res.warnings;
        report["unigram"] = std::move(j);
    }

    PermOptions perm_base;
    perm_base.iterations = opts.mc_iters;
    perm_base.threads = opts.threads;

    auto scalar_section = [&](const char* name, const std::vector<double>& xs,
                              const std::vector<double>& ys, std::uint64_t ks_idx,
                              std::uint64_t perm_idx) {
        json j;
        const auto mc = mc_for(ks_idx);
        j["ks"] = ks_json(section(name,
                                  [&] {
                                      return ks_two_sample(WeightedSample::from_values(xs),
                                                           WeightedSample::from_values(ys), mc);
                                  }),
                          mc.seed);
        PermOptions perm = perm_base;
        perm.seed = derive_seed(opts.seed, perm_idx);
        j["mean_diff"] = perm_json(
            section(name, [&] { return mean_diff_permutation_test(xs, ys, perm); }),
            perm.seed);
        return j;
    };

    report["length"] = scalar_section("length", length_sample(candidate),
                                      length_sample(reference), 5, 6);
    {
        const auto cand_stop = section("stopword", [&] {
            return fraction_distribution(candidate, TokenClass::stopword, stopwords);
        });
        const auto ref_stop = section("stopword", [&] {
            return fraction_distribution(reference, TokenClass::stopword, stopwords);
        });
        report["stopword"] = scalar_section("stopword", cand_stop.values, ref_stop.values, 7, 8);
        const auto cand_sym = section("symbol", [&] {
            return fraction_distribution(candidate, TokenClass::symbol, stopwords);
        });
        const auto ref_sym = section("symbol", [&] {
            return fraction_distribution(reference, TokenClass::symbol, stopwords);
        });
        report["symbol"] = scalar_section("symbol", cand_sym.values, ref_sym.values, 9, 10);
    }

    // Per-length type-token KS.
    json files = json::object();
    {
        const int order = opts.ngram_order;
        const HeapsFit heaps_cand = section("type_token", [&] {
            const auto obs = type_token_observations(candidate, order, TypeTokenMode::terminal);
            return fit_heaps_mle(obs);
        });
        const HeapsFit heaps_ref = section("type_token", [&] {
            const auto obs = type_token_observations(reference, order, TypeTokenMode::terminal);
            return fit_heaps_mle(obs);
        });
        report["fits"]["heaps_candidate"] = heaps_fit_json(heaps_cand);
        report["fits"]["heaps_reference"] = heaps_fit_json(heaps_ref);

        const auto grid = default_length_grid();
        json j;
        j["order"] = order;
        const auto mc11 = mc_for(11);
        const auto rows_theta = section("type_token/D_ptheta", [&] {
            return ks_by_length(candidate, heaps_cand, order, grid, opts.min_bucket, mc11,
                                RefKind::parametric_model);
        });
        j["D_ptheta"] = buckets_json(rows_theta, mc11.seed);
        const auto mc12 = mc_for(12);
        const auto rows_hat = section("type_token/D_phat", [&] {
            return ks_by_length(candidate, heaps_ref, order, grid, opts.min_bucket, mc12,
                                RefKind::parametric_reference);
        });
        j["D_phat"] = buckets_json(rows_hat, mc12.seed);
        const auto mc13 = mc_for(13);
        const auto rows_p = section("type_token/D_p", [&] {
            return ks_by_length(candidate, reference, order, grid, opts.min_bucket, mc13);
        });
        j["D_p"] = buckets_json(rows_p, mc13.seed);
        report["type_token"] = std::move(j);

        maybe_write(opts, files, "type_token_ks_dptheta.csv", buckets_csv(rows_theta));
        maybe_write(opts, files, "type_token_ks_dphat.csv", buckets_csv(rows_hat));
        maybe_write(opts, files, "type_token_ks_dp.csv", buckets_csv(rows_p));
    }
    report["files"] = std::move(files);
    if (!opts.out_dir.empty()) {
        const std::string path = (fs::path(opts.out_dir) / "report.json").string();
        write_file_atomic(path, report.dump(2) + "\n");
        report["files"]["report.json"] = path;
    }
    return report;
}

json run_sample(const SampleOptions& opts) {
    if (opts.model_path.empty() == opts.train_from.empty())
        throw usage_error("sample: provide exactly one of a model file or --train-from");
    if (opts.n_docs < 1) throw usage_error("sample: --n must be >= 1");

    TrigramModel model;
    if (!opts.train_from.empty()) {
        IngestOptions ingest;
        ingest.tokenizer.lowercase = opts.lowercase;
        ingest.tokenizer.pretokenized = opts.pretokenized;
        ingest.keep_empty = opts.keep_empty;
        const Corpus train = load_corpus(opts.train_from, ingest);
        if (train.documents.empty())
            throw data_error("training corpus is empty: " + opts.train_from);
        model = train_trigram(train);
    } else {
        model = load_trigram_json(opts.model_path);
    }
    if (!opts.save_model.empty()) save_trigram_json(model, opts.save_model);

    SamplerConfig config;
    config.scheme = parse_scheme(opts.scheme);
    config.nucleus_mass = opts.nucleus_mass;
    config.beam_size = opts.beam_size;
    config.max_length = opts.max_length;
    config.seed = opts.seed;
    if (config.nucleus_mass <= 0.0 || config.nucleus_mass > 1.0)
        throw usage_error("sample: --nucleus-mass must be in (0, 1]");
    if (config.beam_size < 1) throw usage_error("sample: --beam-size must be >= 1");
    if (config.max_length < 1) throw usage_error("sample: --max-len must be >= 1");

    GenerationStats stats;
    const Corpus corpus = generate_corpus(model, config, opts.n_docs, &stats, opts.threads);

    std::ostringstream text;
    for (const auto& doc : corpus.documents) {
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            if (i > 0) text << ' ';
            text << doc.tokens[i];
        }
        text << '\n';
    }
    if (opts.out.empty()) {
        std::cout << text.str();
    } else {
        write_file_atomic(opts.out, text.str());
    }

    json summary;
    summary["tool"] = "corpusfit";
    summary["version"] = kToolVersion;
    summary["command"] = "sample";
    summary["model"] = opts.model_path.empty() ? ("trained:" + opts.train_from)
                                               : opts.model_path;
    summary["scheme"] = opts.scheme;
    if (config.scheme == SamplingScheme::nucleus) summary["nucleus_mass"] = opts.nucleus_mass;
    if (config.scheme == SamplingScheme::beam) summary["beam_size"] = opts.beam_size;
    summary["max_length"] = opts.max_length;
    summary["documents"] = opts.n_docs;
    summary["seed"] = opts.seed;
    summary["truncated"] = stats.truncated;
    if (!opts.out.empty()) summary["output"] = opts.out;
    if (!opts.save_model.empty()) summary["saved_model"] = opts.save_model;
    return summary;
}

namespace {

void csv_row(std::ostringstream& out, const std::string& test, const std::string& variant,
             double statistic, double p_value, std::int64_t iters, std::uint64_t seed) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g,%lld,%llu\n", test.c_str(),
                  variant.c_str(), statistic, p_value, static_cast<long long>(iters),
                  static_cast<unsigned long long>(seed));
    out << buf;
}

} // namespace

std::string report_to_csv(const nlohmann::ordered_json& report) {
    std::ostringstream out;
    const std::string command = report.value("command", "");
    if (command == "analyze") {
        out << "statistic,value\n";
        const auto& summary = report.at("summary");
        for (auto it = summary.begin(); it != summary.end(); ++it)
            out << it.key() << ',' << it.value().dump() << '\n';
        out << "zipf_s," << report.at("zipf").at("s").dump() << '\n';
        out << "zipf_loglik," << report.at("zipf").at("loglik").dump() << '\n';
        for (const char* key : {"unigram", "bigram"}) {
            const auto& h = report.at("heaps").at(key);
            out << "heaps_" << key << "_alpha," << h.at("alpha").dump() << '\n';
            out << "heaps_" << key << "_beta," << h.at("beta").dump() << '\n';
        }
        return out.str();
    }
    if (command != "compare") throw usage_error("csv format is not defined for: " + command);

    out << "test,variant,statistic,p_value,iters,seed\n";
    for (const char* key : {"D_ptheta", "D_phat", "D_p"}) {
        const auto& r = report.at("rank_frequency").at(key);
        csv_row(out, "rank_frequency", key, r.at("d"), r.at("p_value"),
                r.at("mc_iterations"), r.at("seed"));
    }
    {
        const auto& u = report.at("unigram");
        csv_row(out, "unigram", "tvd_sup", u.at("tvd_sup"), u.at("p_value"),
                u.at("permutations"), u.at("seed"));
    }
    for (const char* sec : {"length", "stopword", "symbol"}) {
        const auto& ks = report.at(sec).at("ks");
        csv_row(out, sec, "ks_D_p", ks.at("d"), ks.at("p_value"), ks.at("mc_iterations"),
                ks.at("seed"));
        const auto& md = report.at(sec).at("mean_diff");
        csv_row(out, sec, "mean_diff", md.at("statistic"), md.at("p_value"),
                md.at("permutations"), md.at("seed"));
    }
    for (const char* key : {"D_ptheta", "D_phat", "D_p"}) {
        const auto& sectj = report.at("type_token").at(key);
        for (const auto& row : sectj.at("buckets")) {
            if (row.contains("skipped")) continue;
            csv_row(out, std::string("type_token/t=") + row.at("t").dump(), key,
                    row.at("d"), row.at("p_value"), row.at("mc_iterations"),
                    sectj.at("seed"));
        }
    }
    return out.str();
}

} // namespace corpusfit
