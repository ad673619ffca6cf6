#include "morphlex/metrics.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/support_index.hpp"
#include "morphlex/unicode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace morphlex {

std::string MarkerRule::apply(std::string_view token) const {
    std::string_view t = token;
    if (!strip_prefix.empty() && t.size() > strip_prefix.size() && t.substr(0, strip_prefix.size()) == strip_prefix) {
        t.remove_prefix(strip_prefix.size());
    }
    if (!strip_suffix.empty() && t.size() > strip_suffix.size() &&
        t.substr(t.size() - strip_suffix.size()) == strip_suffix) {
        t.remove_suffix(strip_suffix.size());
    }
    return std::string(t);
}

namespace {

std::unordered_set<std::string> normalized_vocab(const BpeModel& model, const MarkerRule& markers) {
    std::unordered_set<std::string> set;
    set.reserve(model.vocab.size());
    for (const auto& [token, id] : model.vocab) set.insert(markers.apply(token));
    return set;
}

} // namespace

std::vector<std::string> covered_morphemes(const MorphemeLexicon& lexicon, const BpeModel& model,
                                           const MarkerRule& markers) {
    if (lexicon.morphemes.empty()) throw DegenerateDataError("empty morpheme lexicon");
    const auto vocab = normalized_vocab(model, markers);
    std::vector<std::string> covered;
    for (const auto& m : lexicon.morphemes) {
        if (vocab.count(m)) covered.push_back(m);
    }
    return covered;
}

double lexical_morpheme_coverage(const MorphemeLexicon& lexicon, const BpeModel& model, const MarkerRule& markers) {
    const auto covered = covered_morphemes(lexicon, model, markers);
    return static_cast<double>(covered.size()) / static_cast<double>(lexicon.morphemes.size());
}

OsrResult over_split_rate(const MorphemeLexicon& lexicon, const BpeModel& model,
                          const std::vector<std::string>& eval_words, const MarkerRule& markers) {
    if (lexicon.morphemes.empty()) throw DegenerateDataError("empty morpheme lexicon");
    if (eval_words.empty()) throw DegenerateDataError("empty eval word set");
    const Encoder encoder(model); // throws when the model cannot encode

    const AhoCorasick matcher(lexicon.morphemes);
    std::vector<char> occurs(lexicon.morphemes.size(), 0);
    std::vector<char> as_token(lexicon.morphemes.size(), 0);

    std::vector<uint32_t> hits;
    for (const auto& word : eval_words) {
        const std::string lowered = uni::lower(word);
        hits.clear();
        matcher.contained_ids(lowered, hits);
        if (hits.empty()) continue;
        std::unordered_set<std::string> produced;
        for (const auto& piece : encoder.encode(lowered)) produced.insert(markers.apply(piece.text));
        for (uint32_t id : hits) {
            occurs[id] = 1;
            if (produced.count(lexicon.morphemes[id])) as_token[id] = 1;
        }
    }

    OsrResult result;
    for (std::size_t i = 0; i < lexicon.morphemes.size(); ++i) {
        if (!occurs[i]) {
            result.diag.excluded.push_back(lexicon.morphemes[i]);
        } else if (!as_token[i]) {
            result.diag.oversplit.push_back(lexicon.morphemes[i]);
        }
    }
    result.diag.denominator =
        static_cast<int64_t>(lexicon.morphemes.size()) - static_cast<int64_t>(result.diag.excluded.size());
    if (result.diag.denominator == 0) {
        throw DegenerateDataError("no lexicon morpheme occurs in any eval word");
    }
    result.osr = static_cast<double>(result.diag.oversplit.size()) / static_cast<double>(result.diag.denominator);
    return result;
}

double integrated_performance_score(double lmc, double osr) {
    if (!(lmc >= 0.0 && lmc <= 1.0)) throw ConfigError("LMC must lie in [0, 1]");
    if (!(osr >= 0.0 && osr <= 1.0)) throw ConfigError("OSR must lie in [0, 1]");
    return 1.0 - std::sqrt((1.0 - lmc) * (1.0 - lmc) + osr * osr) / std::sqrt(2.0);
}

std::string EvalReport::csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g,%lld", static_cast<long long>(k), lmc, osr, ips,
                  static_cast<long long>(osr_denominator));
    return buf;
}

EvalReport evaluate_model(const MorphemeLexicon& lexicon, const BpeModel& model,
                          const std::vector<std::string>& eval_words, const MarkerRule& markers) {
    EvalReport report;
    report.k = model.vocab_size_target > 0 ? model.vocab_size_target : static_cast<int64_t>(model.vocab.size());
    report.covered_morphemes = covered_morphemes(lexicon, model, markers);
    report.lmc = static_cast<double>(report.covered_morphemes.size()) / static_cast<double>(lexicon.morphemes.size());
    auto osr = over_split_rate(lexicon, model, eval_words, markers);
    report.osr = osr.osr;
    report.oversplit_morphemes = std::move(osr.diag.oversplit);
    report.osr_denominator = osr.diag.denominator;
    report.ips = integrated_performance_score(report.lmc, report.osr);
    return report;
}

} // namespace morphlex
