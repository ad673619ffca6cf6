#include "morphlex/curve.hpp"
#include "morphlex/imdp.hpp"
#include "morphlex/ingest.hpp"
#include "morphlex/io.hpp"
#include "morphlex/metrics.hpp"
#include "morphlex/unicode.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

namespace py = pybind11;
using namespace morphlex;

namespace {

std::unordered_set<char32_t> charset(const std::string& chars) {
    std::unordered_set<char32_t> set;
    for (char32_t c : uni::decode_utf8(uni::nfc(chars))) set.insert(c);
    return set;
}

AlphabetConfig make_alphabet(const std::string& alphabet, const std::string& whitelist, int min_length,
                             int max_length) {
    AlphabetConfig cfg;
    cfg.valid_chars = charset(alphabet);
    cfg.whitelist = charset(whitelist);
    cfg.min_length = min_length;
    cfg.max_length = max_length;
    cfg.validate();
    return cfg;
}

std::vector<Candidate> candidates_of(const std::vector<std::string>& surfaces) {
    std::vector<Candidate> out;
    out.reserve(surfaces.size());
    for (const auto& s : surfaces) out.push_back({s, false, false, CandidateSource::PlainList});
    return out;
}

ScoreTable table_of(const std::map<std::string, double>& entries, int iteration) {
    ScoreTable t;
    t.iteration = iteration;
    for (const auto& [k, v] : entries) t.entries.emplace(k, v);
    return t;
}

std::map<std::string, double> dict_of(const ScoreTable& t) {
    return {t.entries.begin(), t.entries.end()};
}

MorphemeLexicon lexicon_of(std::vector<std::string> morphemes) {
    MorphemeLexicon lex;
    std::sort(morphemes.begin(), morphemes.end());
    morphemes.erase(std::unique(morphemes.begin(), morphemes.end()), morphemes.end());
    lex.morphemes = std::move(morphemes);
    return lex;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Morphological lexicon refinement and BPE tokenizer evaluation.";

    // ---- candidate filtering and scoring
    m.def(
        "prefilter",
        [](const std::vector<std::string>& surfaces, const std::string& alphabet, const std::string& whitelist,
           int min_length, int max_length) {
            const auto cfg = make_alphabet(alphabet, whitelist, min_length, max_length);
            std::vector<std::string> kept;
            for (const auto& c : prefilter(candidates_of(surfaces), cfg)) kept.push_back(c.surface);
            return kept;
        },
        py::arg("surfaces"), py::arg("alphabet"), py::arg("whitelist") = "", py::arg("min_length") = 1,
        py::arg("max_length") = 30);

    m.def(
        "support_counts",
        [](const std::vector<std::string>& surfaces) {
            const auto index = SupportIndex::build(candidates_of(surfaces));
            std::map<std::string, int64_t> counts;
            for (std::size_t i = 0; i < surfaces.size(); ++i) counts[surfaces[i]] = index.support_by_id(i);
            return counts;
        },
        py::arg("surfaces"));

    m.def(
        "initial_scores",
        [](const std::vector<std::string>& surfaces) { return dict_of(initial_scores(candidates_of(surfaces))); },
        py::arg("surfaces"));

    m.def(
        "best_explanation",
        [](const std::string& token, const std::map<std::string, double>& scores, const std::string& whitelist)
            -> std::optional<std::pair<std::vector<std::string>, double>> {
            const auto d = best_explanation(token, table_of(scores, 0), charset(whitelist));
            if (!d) return std::nullopt;
            return std::make_pair(d->parts, d->total_score);
        },
        py::arg("token"), py::arg("scores"), py::arg("whitelist") = "");

    m.def(
        "run_refinement",
        [](const std::vector<std::string>& surfaces, const std::string& whitelist, double epsilon,
           int max_iterations) {
            AlphabetConfig cfg;
            cfg.whitelist = charset(whitelist);
            for (char32_t c : cfg.whitelist) cfg.valid_chars.insert(c);
            RefineParams params{epsilon, max_iterations};
            const auto run = run_refinement(candidates_of(surfaces), cfg, params);
            py::dict out;
            out["scores"] = dict_of(run.state.scores);
            out["initial_scores"] = dict_of(run.state.initial_scores);
            out["iterations"] = run.state.iteration;
            out["stop_reason"] = run.stop_reason == StopReason::Converged ? "converged" : "max_iterations";
            out["max_delta_history"] = run.max_delta_history;
            return out;
        },
        py::arg("surfaces"), py::arg("whitelist") = "", py::arg("epsilon") = 1e-7, py::arg("max_iterations") = 100);

    m.def(
        "otsu_threshold",
        [](const std::vector<double>& scores, int bins) {
            const auto r = otsu_threshold(scores, bins);
            return std::make_pair(r.threshold, r.inter_class_variance);
        },
        py::arg("scores"), py::arg("bins") = 256);

    m.def(
        "reduction_stats",
        [](int64_t initial, int64_t final_count) {
            const auto s = reduction_stats(initial, final_count);
            return std::make_pair(s.percent, s.factor);
        },
        py::arg("initial"), py::arg("final"));

    // ---- BPE
    py::class_<BpeModel>(m, "BpeModel")
        .def_property_readonly("vocab",
                               [](const BpeModel& model) {
                                   return std::map<std::string, int64_t>(model.vocab.begin(), model.vocab.end());
                               })
        .def_property_readonly("merges",
                               [](const BpeModel& model) {
                                   std::vector<std::pair<std::string, std::string>> out;
                                   if (model.merges) {
                                       for (const auto& p : *model.merges) out.emplace_back(p.left, p.right);
                                   }
                                   return out;
                               })
        .def_property_readonly("vocab_size_target", [](const BpeModel& model) { return model.vocab_size_target; })
        .def_property_readonly("encode_capable", &BpeModel::encode_capable)
        .def(
            "encode",
            [](const BpeModel& model, const std::string& word) {
                std::vector<std::pair<std::string, bool>> out;
                for (const auto& t : encode(model, word)) out.emplace_back(t.text, t.known);
                return out;
            },
            py::arg("word"))
        .def(
            "encode_surfaces",
            [](const BpeModel& model, const std::string& word) {
                std::vector<std::string> out;
                for (const auto& t : encode(model, word)) out.push_back(t.text);
                return out;
            },
            py::arg("word"));

    m.def(
        "train_bpe",
        [](const std::map<std::string, int64_t>& counts, int64_t k, int64_t min_frequency) {
            WordCounts wc;
            wc.counts = counts;
            return train(wc, k, min_frequency);
        },
        py::arg("counts"), py::arg("k"), py::arg("min_frequency") = 2);

    m.def("count_words", [](const std::string& text) { return count_words_text(text).counts; }, py::arg("text"));
    m.def("import_vocab", &import_vocab, py::arg("path"));
    m.def("write_model", &write_model, py::arg("model"), py::arg("path"));

    // ---- metrics
    m.def(
        "lexical_morpheme_coverage",
        [](const std::vector<std::string>& morphemes, const BpeModel& model, const std::string& strip_prefix,
           const std::string& strip_suffix) {
            return lexical_morpheme_coverage(lexicon_of(morphemes), model, {strip_prefix, strip_suffix});
        },
        py::arg("morphemes"), py::arg("model"), py::arg("strip_prefix") = "", py::arg("strip_suffix") = "");

    m.def(
        "over_split_rate",
        [](const std::vector<std::string>& morphemes, const BpeModel& model,
           const std::vector<std::string>& eval_words, const std::string& strip_prefix,
           const std::string& strip_suffix) {
            const auto r = over_split_rate(lexicon_of(morphemes), model, eval_words, {strip_prefix, strip_suffix});
            py::dict out;
            out["osr"] = r.osr;
            out["oversplit"] = r.diag.oversplit;
            out["excluded"] = r.diag.excluded;
            out["denominator"] = r.diag.denominator;
            return out;
        },
        py::arg("morphemes"), py::arg("model"), py::arg("eval_words"), py::arg("strip_prefix") = "",
        py::arg("strip_suffix") = "");

    m.def("integrated_performance_score", &integrated_performance_score, py::arg("lmc"), py::arg("osr"));

    // ---- curve analysis
    auto curve_of = [](const std::vector<std::pair<int64_t, double>>& points) {
        IpsCurve curve;
        for (const auto& [k, ips] : points) curve.points.push_back({k, ips});
        curve.validate(1);
        return curve;
    };

    m.def(
        "kneedle_elbow",
        [curve_of](const std::vector<std::pair<int64_t, double>>& points, double sensitivity) {
            const auto r = kneedle_elbow(curve_of(points), sensitivity);
            return std::make_pair(r.k, r.distinct_knee);
        },
        py::arg("points"), py::arg("sensitivity") = 1.0);

    m.def("q90_point", [curve_of](const std::vector<std::pair<int64_t, double>>& points) {
        return q90_point(curve_of(points));
    });

    m.def(
        "max_gain_point",
        [curve_of](const std::vector<std::pair<int64_t, double>>& points, const std::string& mode) {
            return max_gain_point(curve_of(points), gain_mode_from_name(mode));
        },
        py::arg("points"), py::arg("mode") = "absolute");

    m.def(
        "recommend_range",
        [curve_of](const std::vector<std::pair<int64_t, double>>& points, double sensitivity,
                   const std::string& mode) {
            const auto a = recommend_range(curve_of(points), sensitivity, gain_mode_from_name(mode));
            py::dict out;
            out["k_elbow"] = a.k_elbow;
            out["k_q90"] = a.k_q90;
            out["k_gain"] = a.k_gain;
            out["recommended_range"] = std::make_pair(a.recommended_range.first, a.recommended_range.second);
            out["degenerate_range"] = a.degenerate_range;
            out["distinct_knee"] = a.distinct_knee;
            out["gain_mode"] = gain_mode_name(a.gain_mode);
            return out;
        },
        py::arg("points"), py::arg("sensitivity") = 1.0, py::arg("mode") = "absolute");

    m.def(
        "load_curve_csv",
        [](const std::filesystem::path& path) {
            std::vector<std::pair<int64_t, double>> out;
            for (const auto& p : load_curve_csv(path).points) out.emplace_back(p.k, p.ips);
            return out;
        },
        py::arg("path"));
}
