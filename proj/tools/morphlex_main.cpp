#include "morphlex/curve.hpp"
#include "morphlex/errors.hpp"
#include "morphlex/imdp.hpp"
#include "morphlex/ingest.hpp"
#include "morphlex/io.hpp"
#include "morphlex/metrics.hpp"
#include "morphlex/unicode.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kDegenerateData = 3;
constexpr int kBadConfig = 4;

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw morphlex::IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw morphlex::IoError("write failure on " + path.string());
}

std::string charset_to_string(const std::unordered_set<char32_t>& set) {
    std::u32string chars(set.begin(), set.end());
    std::sort(chars.begin(), chars.end());
    return morphlex::uni::encode_utf8(chars);
}

// ---------------------------------------------------------------- ingest ---

struct IngestArgs {
    std::string dic;
    std::string aff;
    std::string out;
};

int run_ingest(const IngestArgs& args) {
    std::vector<std::string> warnings;
    const auto stems = morphlex::parse_dic(args.dic, &warnings);
    std::vector<morphlex::AffRule> rules;
    if (!args.aff.empty()) rules = morphlex::parse_aff(args.aff, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    const auto merged = morphlex::merge_candidates(stems, rules);
    morphlex::write_candidate_file(args.out, merged);

    std::size_t prefix_rules = 0, suffix_rules = 0;
    for (const auto& r : rules) (r.kind == morphlex::AffixKind::Prefix ? prefix_rules : suffix_rules)++;
    json summary{
        {"stems", stems.size()},
        {"prefix_rules", prefix_rules},
        {"suffix_rules", suffix_rules},
        {"merged_candidates", merged.size()},
        {"out", args.out},
        {"config", {{"dic", args.dic}, {"aff", args.aff}}},
    };
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- refine ---

struct RefineArgs {
    std::string candidates;
    std::string config_path;
    std::string alphabet;
    std::string whitelist;
    std::string language;
    std::string out_lexicon;
    std::string out_scores;
    std::string out_report;
    std::optional<int64_t> support_m;
    std::optional<double> epsilon;
    std::optional<int> max_iterations;
    std::optional<int> otsu_bins;
    std::optional<int> min_length;
    std::optional<int> max_length;
};

morphlex::PipelineConfig effective_config(const RefineArgs& args) {
    morphlex::PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = morphlex::load_config(args.config_path);
    if (!args.alphabet.empty()) {
        cfg.alphabet.valid_chars.clear();
        for (char32_t c : morphlex::uni::decode_utf8(morphlex::uni::nfc(args.alphabet))) {
            cfg.alphabet.valid_chars.insert(c);
        }
    }
    if (!args.whitelist.empty()) {
        cfg.alphabet.whitelist.clear();
        for (char32_t c : morphlex::uni::decode_utf8(morphlex::uni::nfc(args.whitelist))) {
            cfg.alphabet.whitelist.insert(c);
        }
    }
    if (args.support_m) cfg.support_m = *args.support_m;
    if (args.epsilon) cfg.epsilon = *args.epsilon;
    if (args.max_iterations) cfg.max_iterations = *args.max_iterations;
    if (args.otsu_bins) cfg.otsu_bins = *args.otsu_bins;
    if (args.min_length) cfg.alphabet.min_length = *args.min_length;
    if (args.max_length) cfg.alphabet.max_length = *args.max_length;
    if (cfg.alphabet.valid_chars.empty()) {
        throw morphlex::ConfigError("an alphabet is required (--config or --alphabet)");
    }
    cfg.validate();
    return cfg;
}

int run_refine(const RefineArgs& args) {
    const auto cfg = effective_config(args);
    const auto raw = morphlex::read_candidate_file(args.candidates);
    std::cerr << "read " << raw.size() << " raw candidates\n";

    const auto filtered = morphlex::prefilter(raw, cfg.alphabet);
    std::cerr << "prefilter kept " << filtered.size() << '\n';
    const auto deduped = morphlex::dedupe_surfaces(filtered);
    std::cerr << "dedupe kept " << deduped.size() << '\n';

    std::vector<morphlex::Candidate> pool;
    if (!deduped.empty()) {
        const auto index = morphlex::SupportIndex::build(deduped);
        pool = morphlex::support_filter(index, cfg.support_m);
    }
    std::cerr << "support filter (m=" << cfg.support_m << ") kept " << pool.size() << '\n';
    if (pool.empty()) throw morphlex::DegenerateDataError("no candidates survive filtering");

    morphlex::RefineParams params;
    params.epsilon = cfg.epsilon;
    params.max_iterations = cfg.max_iterations;
    const auto run = morphlex::run_refinement(pool, cfg.alphabet, params);
    std::cerr << "refinement stopped after " << run.state.iteration << " iterations\n";

    std::vector<double> final_scores;
    final_scores.reserve(run.state.scores.entries.size());
    for (const auto& [token, score] : run.state.scores.entries) final_scores.push_back(score);
    const auto otsu = morphlex::otsu_threshold(final_scores, cfg.otsu_bins);

    auto lexicon = morphlex::extract_lexicon(run.state, otsu, args.language);
    if (lexicon.morphemes.empty()) {
        std::cerr << "warning: threshold " << otsu.threshold << " leaves an empty lexicon\n";
    }
    morphlex::write_lexicon(lexicon, args.out_lexicon);
    morphlex::write_score_table(run.state.scores, args.out_scores);

    json report{
        {"config",
         {{"candidates", args.candidates},
          {"config_file", args.config_path},
          {"language", args.language},
          {"alphabet", charset_to_string(cfg.alphabet.valid_chars)},
          {"whitelist", charset_to_string(cfg.alphabet.whitelist)},
          {"min_length", cfg.alphabet.min_length},
          {"max_length", cfg.alphabet.max_length},
          {"support_m", cfg.support_m},
          {"epsilon", cfg.epsilon},
          {"max_iterations", cfg.max_iterations},
          {"otsu_bins", cfg.otsu_bins}}},
        {"pool_sizes_per_stage",
         {{"raw", raw.size()},
          {"prefiltered", filtered.size()},
          {"deduped", deduped.size()},
          {"support_filtered", pool.size()}}},
        {"iterations", run.state.iteration},
        {"stop_reason", run.stop_reason == morphlex::StopReason::Converged ? "converged" : "max_iterations"},
        {"max_delta_history", run.max_delta_history},
        {"otsu_threshold", otsu.threshold},
        {"otsu_inter_class_variance", otsu.inter_class_variance},
        {"lexicon_size", lexicon.morphemes.size()},
    };
    if (!lexicon.morphemes.empty()) {
        const auto stats =
            morphlex::reduction_stats(static_cast<int64_t>(raw.size()), static_cast<int64_t>(lexicon.morphemes.size()));
        report["reduction"] = {{"percent", stats.percent}, {"factor", stats.factor}};
    } else {
        report["reduction"] = nullptr;
    }
    const std::string dumped = report.dump(2) + "\n";
    if (!args.out_report.empty()) write_text(args.out_report, dumped);
    std::cout << dumped;
    return kOk;
}

// -------------------------------------------------------------- train-bpe ---

struct TrainArgs {
    std::string corpus;
    std::string out;
    int64_t vocab_size = 0;
    int64_t min_frequency = 2;
    bool lowercase = false;
};

morphlex::WordCounts read_corpus_counts(const std::string& path, bool lowercase) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw morphlex::IoError("cannot open " + path);
    auto counts = morphlex::count_words(in);
    if (!lowercase) return counts;
    morphlex::WordCounts lowered;
    for (const auto& [word, freq] : counts.counts) lowered.counts[morphlex::uni::lower(word)] += freq;
    return lowered;
}

int run_train(const TrainArgs& args) {
    const auto counts = read_corpus_counts(args.corpus, args.lowercase);
    const auto model = morphlex::train(counts, args.vocab_size, args.min_frequency);
    morphlex::write_model(model, args.out);
    json summary{
        {"vocab_size", model.vocab.size()},
        {"merges", model.merges->size()},
        {"distinct_words", counts.counts.size()},
        {"out", args.out},
        {"config",
         {{"corpus", args.corpus},
          {"vocab_size_target", args.vocab_size},
          {"min_frequency", args.min_frequency},
          {"lowercase", args.lowercase}}},
    };
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- evaluate ---

struct EvalArgs {
    std::string model;
    std::string lexicon;
    std::string words;
    std::string out;
    std::string strip_prefix;
    std::string strip_suffix;
    std::size_t cap = 1000000;
    bool lmc_only = false;
};

json report_config(const EvalArgs& args) {
    return {{"model", args.model},         {"lexicon", args.lexicon},
            {"words", args.words},         {"eval_word_cap", args.cap},
            {"strip_prefix", args.strip_prefix}, {"strip_suffix", args.strip_suffix},
            {"lmc_only", args.lmc_only},   {"eval_words_lowercased", true}};
}

int run_evaluate(const EvalArgs& args) {
    const auto model = morphlex::import_vocab(args.model);
    const auto lexicon = morphlex::read_lexicon(args.lexicon);
    morphlex::MarkerRule markers{args.strip_prefix, args.strip_suffix};

    json out;
    if (args.lmc_only) {
        const auto covered = morphlex::covered_morphemes(lexicon, model, markers);
        const double lmc = static_cast<double>(covered.size()) / static_cast<double>(lexicon.morphemes.size());
        out = json{{"k", model.vocab_size_target},
                   {"lmc", lmc},
                   {"covered_morphemes", covered},
                   {"config", report_config(args)}};
    } else {
        if (!model.encode_capable()) {
            throw morphlex::IoError("model " + args.model +
                                    " has no merge list; use --lmc-only or supply merges");
        }
        const auto eval_words = morphlex::load_wordlist(args.words, args.cap);
        const auto report = morphlex::evaluate_model(lexicon, model, eval_words, markers);
        out = json{{"k", report.k},
                   {"lmc", report.lmc},
                   {"osr", report.osr},
                   {"ips", report.ips},
                   {"osr_denominator", report.osr_denominator},
                   {"covered_morphemes", report.covered_morphemes},
                   {"oversplit_morphemes", report.oversplit_morphemes},
                   {"csv_row", report.csv_row()},
                   {"config", report_config(args)}};
    }
    const std::string dumped = out.dump(2) + "\n";
    if (!args.out.empty()) write_text(args.out, dumped);
    std::cout << dumped;
    return kOk;
}

// ------------------------------------------------------------------ sweep ---

struct SweepArgs {
    std::string corpus;
    std::string import_dir;
    std::string lexicon;
    std::string words;
    std::string out;
    std::string strip_prefix;
    std::string strip_suffix;
    std::vector<int64_t> sizes;
    int64_t min_frequency = 2;
    std::size_t cap = 1000000;
    bool lowercase = false;
};

int run_sweep(const SweepArgs& args) {
    if (args.corpus.empty() == args.import_dir.empty()) {
        throw morphlex::ConfigError("exactly one of --corpus or --import-dir is required");
    }
    const auto lexicon = morphlex::read_lexicon(args.lexicon);
    const auto eval_words = morphlex::load_wordlist(args.words, args.cap);
    morphlex::MarkerRule markers{args.strip_prefix, args.strip_suffix};

    std::vector<morphlex::EvalReport> rows;
    if (!args.corpus.empty()) {
        if (args.sizes.empty()) throw morphlex::ConfigError("--sizes is required with --corpus");
        for (std::size_t i = 1; i < args.sizes.size(); ++i) {
            if (args.sizes[i] <= args.sizes[i - 1]) {
                throw morphlex::ConfigError("vocab sizes must be strictly increasing");
            }
        }
        const auto counts = read_corpus_counts(args.corpus, args.lowercase);
        for (int64_t k : args.sizes) {
            std::cerr << "training k=" << k << '\n';
            const auto model = morphlex::train(counts, k, args.min_frequency);
            rows.push_back(morphlex::evaluate_model(lexicon, model, eval_words, markers));
            rows.back().k = k;
        }
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(args.import_dir)) {
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        }
        if (files.empty()) throw morphlex::IoError("no .json models in " + args.import_dir);
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::cerr << "evaluating " << file.string() << '\n';
            const auto model = morphlex::import_vocab(file);
            rows.push_back(morphlex::evaluate_model(lexicon, model, eval_words, markers));
        }
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].k == rows[i - 1].k) {
                throw morphlex::ConfigError("two imported models share k=" + std::to_string(rows[i].k));
            }
        }
    }

    std::string csv = "k,lmc,osr,ips\n";
    for (const auto& r : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g\n", static_cast<long long>(r.k), r.lmc, r.osr,
                      r.ips);
        csv += buf;
    }
    write_text(args.out, csv);

    json summary{
        {"rows", rows.size()},
        {"out", args.out},
        {"config",
         {{"corpus", args.corpus},
          {"import_dir", args.import_dir},
          {"lexicon", args.lexicon},
          {"words", args.words},
          {"sizes", args.sizes},
          {"min_frequency", args.min_frequency},
          {"eval_word_cap", args.cap},
          {"lowercase", args.lowercase},
          {"strip_prefix", args.strip_prefix},
          {"strip_suffix", args.strip_suffix},
          {"eval_words_lowercased", true}}},
    };
    std::cout << summary.dump(2) << '\n';
    return kOk;
}

// ---------------------------------------------------------------- analyze ---

struct AnalyzeArgs {
    std::string curve;
    std::string out;
    double sensitivity = 1.0;
    std::string gain_mode = "absolute";
};

int run_analyze(const AnalyzeArgs& args) {
    const auto curve = morphlex::load_curve_csv(args.curve);
    const auto mode = morphlex::gain_mode_from_name(args.gain_mode);
    const auto analysis = morphlex::recommend_range(curve, args.sensitivity, mode);

    if (!analysis.increasing_overall) std::cerr << "warning: curve is not increasing overall\n";
    if (!analysis.distinct_knee) std::cerr << "warning: no distinct knee; using the global difference maximum\n";
    if (analysis.degenerate_range) std::cerr << "warning: degenerate range (elbow beyond the q90 point)\n";

    json out{
        {"k_elbow", analysis.k_elbow},
        {"k_q90", analysis.k_q90},
        {"k_gain", analysis.k_gain},
        {"gain_mode", morphlex::gain_mode_name(analysis.gain_mode)},
        {"recommended_range", {analysis.recommended_range.first, analysis.recommended_range.second}},
        {"distinct_knee", analysis.distinct_knee},
        {"increasing_overall", analysis.increasing_overall},
        {"degenerate_range", analysis.degenerate_range},
        {"curve_points", curve.points.size()},
        {"config", {{"curve", args.curve}, {"sensitivity", args.sensitivity}, {"gain_mode", args.gain_mode}}},
    };
    const std::string dumped = out.dump(2) + "\n";
    if (!args.out.empty()) write_text(args.out, dumped);
    std::cout << dumped;
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus-free morphological lexicon refinement and BPE tokenizer evaluation"};
    app.require_subcommand(1);

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand("ingest", "build a raw candidate list from Hunspell files");
    ingest->add_option("--dic", ingest_args.dic, "Hunspell .dic file")->required();
    ingest->add_option("--aff", ingest_args.aff, "Hunspell .aff file");
    ingest->add_option("--out", ingest_args.out, "candidate list to write")->required();

    RefineArgs refine_args;
    auto* refine = app.add_subcommand("refine", "refine a candidate list into a morpheme lexicon");
    refine->add_option("--cands", refine_args.candidates, "candidate list file")->required();
    refine->add_option("--config", refine_args.config_path, "pipeline config JSON");
    refine->add_option("--alphabet", refine_args.alphabet, "alphabet characters (overrides config)");
    refine->add_option("--whitelist", refine_args.whitelist, "single-character morphemes (overrides config)");
    refine->add_option("--language", refine_args.language, "language tag recorded in outputs");
    refine->add_option("--out-lexicon", refine_args.out_lexicon, "lexicon file to write")->required();
    refine->add_option("--out-scores", refine_args.out_scores, "score CSV to write")->required();
    refine->add_option("--report", refine_args.out_report, "run report JSON to write");
    refine->add_option("--support-m", refine_args.support_m, "type-support threshold m");
    refine->add_option("--epsilon", refine_args.epsilon, "convergence threshold");
    refine->add_option("--max-iterations", refine_args.max_iterations, "iteration cap");
    refine->add_option("--otsu-bins", refine_args.otsu_bins, "histogram bins for thresholding");
    refine->add_option("--min-length", refine_args.min_length, "minimum token length");
    refine->add_option("--max-length", refine_args.max_length, "maximum token length");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train-bpe", "train a character-level BPE model");
    train->add_option("--corpus", train_args.corpus, "training text")->required();
    train->add_option("--vocab-size", train_args.vocab_size, "target vocabulary size")->required();
    train->add_option("--min-frequency", train_args.min_frequency, "minimum pair frequency for merges");
    train->add_flag("--lowercase", train_args.lowercase, "lowercase corpus words before counting");
    train->add_option("--out", train_args.out, "model JSON to write")->required();

    EvalArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "score one model against a lexicon");
    evaluate->add_option("--model", eval_args.model, "model JSON")->required();
    evaluate->add_option("--lexicon", eval_args.lexicon, "morpheme lexicon file")->required();
    evaluate->add_option("--words", eval_args.words, "evaluation wordlist");
    evaluate->add_option("--cap", eval_args.cap, "evaluation word cap");
    evaluate->add_option("--strip-prefix", eval_args.strip_prefix, "marker prefix to strip from tokens");
    evaluate->add_option("--strip-suffix", eval_args.strip_suffix, "marker suffix to strip from tokens");
    evaluate->add_flag("--lmc-only", eval_args.lmc_only, "skip OSR/IPS (vocab-only models)");
    evaluate->add_option("--out", eval_args.out, "report JSON to write");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "evaluate models across vocabulary sizes");
    sweep->add_option("--corpus", sweep_args.corpus, "training text (train per size)");
    sweep->add_option("--import-dir", sweep_args.import_dir, "directory of model JSONs (no training)");
    sweep->add_option("--sizes", sweep_args.sizes, "vocabulary sizes, ascending")->delimiter(',');
    sweep->add_option("--min-frequency", sweep_args.min_frequency, "minimum pair frequency for merges");
    sweep->add_flag("--lowercase", sweep_args.lowercase, "lowercase corpus words before counting");
    sweep->add_option("--lexicon", sweep_args.lexicon, "morpheme lexicon file")->required();
    sweep->add_option("--words", sweep_args.words, "evaluation wordlist")->required();
    sweep->add_option("--cap", sweep_args.cap, "evaluation word cap");
    sweep->add_option("--strip-prefix", sweep_args.strip_prefix, "marker prefix to strip from tokens");
    sweep->add_option("--strip-suffix", sweep_args.strip_suffix, "marker suffix to strip from tokens");
    sweep->add_option("--out", sweep_args.out, "curve CSV to write")->required();

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "locate key points on an IPS curve");
    analyze->add_option("--curve", analyze_args.curve, "curve CSV (k,ips or k,lmc,osr)")->required();
    analyze->add_option("--sensitivity", analyze_args.sensitivity, "kneedle sensitivity");
    analyze->add_option("--gain-mode", analyze_args.gain_mode, "absolute or per-unit");
    analyze->add_option("--out", analyze_args.out, "analysis JSON to write");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(ingest)) return run_ingest(ingest_args);
        if (app.got_subcommand(refine)) return run_refine(refine_args);
        if (app.got_subcommand(train)) return run_train(train_args);
        if (app.got_subcommand(evaluate)) return run_evaluate(eval_args);
        if (app.got_subcommand(sweep)) return run_sweep(sweep_args);
        if (app.got_subcommand(analyze)) return run_analyze(analyze_args);
        return kBadConfig;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadConfig;
    } catch (const morphlex::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadConfig;
    } catch (const morphlex::DegenerateDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDegenerateData;
    } catch (const morphlex::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInputError;
    }
}
