#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "corpusfit/errors.hpp"
#include "corpusfit/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

void add_common(CLI::App* cmd, corpusfit::CommonOptions& opts) {
    cmd->add_option("--stopwords", opts.stopwords_path, "Stopword file (one token per line)")
        ->envname("CORPUSFIT_STOPWORDS");
    cmd->add_flag("--pretokenized", opts.pretokenized,
                  "Input is already tokenized; split on whitespace only")
        ->envname("CORPUSFIT_PRETOKENIZED");
    cmd->add_flag("--keep-empty", opts.keep_empty, "Keep empty lines as empty documents")
        ->envname("CORPUSFIT_KEEP_EMPTY");
    cmd->add_flag("--lowercase,!--no-lowercase", opts.lowercase, "Lowercase input (default on)")
        ->envname("CORPUSFIT_LOWERCASE");
    cmd->add_option("--max-rank", opts.max_rank, "Rank-frequency truncation")
        ->capture_default_str()
        ->envname("CORPUSFIT_MAX_RANK");
    cmd->add_option("--ngram-order", opts.ngram_order, "Type-token n-gram order")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str()
        ->envname("CORPUSFIT_NGRAM_ORDER");
    cmd->add_option("--mc-iters", opts.mc_iters, "Monte-Carlo / permutation iterations")
        ->capture_default_str()
        ->envname("CORPUSFIT_MC_ITERS");
    cmd->add_option("--seed", opts.seed, "Master RNG seed")
        ->capture_default_str()
        ->envname("CORPUSFIT_SEED");
    cmd->add_option("--threads", opts.threads, "Worker threads (0 = auto)")
        ->capture_default_str()
        ->envname("CORPUSFIT_THREADS");
    cmd->add_option("--out", opts.out_dir, "Directory for the report and CSV sidecars")
        ->envname("CORPUSFIT_OUT");
    cmd->add_option("--format", opts.format, "Report format on stdout")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str()
        ->envname("CORPUSFIT_FORMAT");
}

void print_report(const nlohmann::ordered_json& report, const std::string& format) {
    if (format == "csv") {
        std::cout << corpusfit::report_to_csv(report);
    } else {
        std::cout << report.dump(2) << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpusfit: statistical-tendency analysis of text corpora"};
    app.require_subcommand(1);

    corpusfit::AnalyzeOptions analyze_opts;
    auto* analyze = app.add_subcommand(
        "analyze", "Distributions, law fits, and summary statistics of one corpus");
    analyze->add_option("--input", analyze_opts.input, "Corpus file, one document per line")
        ->required()
        ->envname("CORPUSFIT_INPUT");
    analyze->add_option("--bootstrap", analyze_opts.bootstrap,
                        "Bootstrap reps for summary-stat standard deviations (0 = off)")
        ->capture_default_str()
        ->envname("CORPUSFIT_BOOTSTRAP");
    add_common(analyze, analyze_opts);

    corpusfit::CompareOptions compare_opts;
    auto* compare = app.add_subcommand(
        "compare", "Full test battery of a candidate corpus against a reference corpus");
    compare->add_option("--input", compare_opts.input, "Candidate corpus")
        ->required()
        ->envname("CORPUSFIT_INPUT");
    compare->add_option("--reference", compare_opts.reference, "Reference corpus")
        ->required()
        ->envname("CORPUSFIT_REFERENCE");
    compare->add_option("--min-bucket", compare_opts.min_bucket,
                        "Minimum per-side population for a type-token length bucket")
        ->capture_default_str()
        ->envname("CORPUSFIT_MIN_BUCKET");
    add_common(compare, compare_opts);

    corpusfit::SampleOptions sample_opts;
    auto* sample = app.add_subcommand("sample", "Generate a corpus from a trigram model");
    sample->add_option("model", sample_opts.model_path, "Trained trigram model (JSON)");
    sample->add_option("--train-from", sample_opts.train_from,
                       "Train a trigram model on this corpus instead of loading one")
        ->envname("CORPUSFIT_TRAIN_FROM");
    sample->add_option("--save-model", sample_opts.save_model, "Write the trained model here")
        ->envname("CORPUSFIT_SAVE_MODEL");
    sample->add_option("--out", sample_opts.out, "Output corpus file (default stdout)")
        ->envname("CORPUSFIT_OUT");
    sample->add_option("--scheme", sample_opts.scheme, "random | nucleus | beam")
        ->check(CLI::IsMember({"random", "nucleus", "beam"}))
        ->capture_default_str()
        ->envname("CORPUSFIT_SCHEME");
    sample->add_option("--n", sample_opts.n_docs, "Number of documents to generate")
        ->capture_default_str()
        ->envname("CORPUSFIT_N");
    sample->add_option("--nucleus-mass", sample_opts.nucleus_mass, "Nucleus mass in (0, 1]")
        ->capture_default_str()
        ->envname("CORPUSFIT_NUCLEUS_MASS");
    sample->add_option("--beam-size", sample_opts.beam_size, "Beam size")
        ->capture_default_str()
        ->envname("CORPUSFIT_BEAM_SIZE");
    sample->add_option("--max-len", sample_opts.max_length, "Maximum document length")
        ->capture_default_str()
        ->envname("CORPUSFIT_MAX_LEN");
    sample->add_option("--seed", sample_opts.seed, "Master RNG seed")
        ->capture_default_str()
        ->envname("CORPUSFIT_SEED");
    sample->add_option("--threads", sample_opts.threads, "Worker threads (0 = auto)")
        ->capture_default_str()
        ->envname("CORPUSFIT_THREADS");
    sample->add_flag("--pretokenized", sample_opts.pretokenized,
                     "Training corpus is already tokenized")
        ->envname("CORPUSFIT_PRETOKENIZED");
    sample->add_flag("--keep-empty", sample_opts.keep_empty,
                     "Keep empty training lines as empty documents")
        ->envname("CORPUSFIT_KEEP_EMPTY");
    sample->add_flag("--lowercase,!--no-lowercase", sample_opts.lowercase,
                     "Lowercase the training corpus (default on)")
        ->envname("CORPUSFIT_LOWERCASE");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (analyze->parsed()) {
            print_report(corpusfit::run_analyze(analyze_opts), analyze_opts.format);
        } else if (compare->parsed()) {
            print_report(corpusfit::run_compare(compare_opts), compare_opts.format);
        } else if (sample->parsed()) {
            const auto summary = corpusfit::run_sample(sample_opts);
            if (sample_opts.out.empty()) {
                std::cerr << summary.dump(2) << "\n"; // corpus owns stdout
            } else {
                std::cout << summary.dump(2) << "\n";
            }
        }
    } catch (const corpusfit::usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const corpusfit::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const corpusfit::numerical_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
