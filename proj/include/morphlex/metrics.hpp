#pragma once

#include "morphlex/bpe.hpp"
#include "morphlex/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace morphlex {

// Optional stripping of continuation/word markers from token surfaces
// before comparing them with morphemes. Defaults strip nothing.
struct MarkerRule {
    std::string strip_prefix;
    std::string strip_suffix;

    std::string apply(std::string_view token) const;
    bool active() const { return !strip_prefix.empty() || !strip_suffix.empty(); }
};

// Fraction of lexicon morphemes present verbatim in the vocabulary.
double lexical_morpheme_coverage(const MorphemeLexicon& lexicon, const BpeModel& model,
                                 const MarkerRule& markers = {});

// Morphemes present in the vocabulary, for diagnostics.
std::vector<std::string> covered_morphemes(const MorphemeLexicon& lexicon, const BpeModel& model,
                                           const MarkerRule& markers = {});

struct OsrDiagnostics {
    std::vector<std::string> oversplit; // in >= 1 word, never a single token
    std::vector<std::string> excluded;  // in no eval word at all
    int64_t denominator = 0;            // morphemes occurring in >= 1 word
};

struct OsrResult {
    double osr = 0.0;
    OsrDiagnostics diag;
};

// Fraction of morphemes (among those occurring as a substring of at least
// one lowercased eval word) that never surface as a single token in any
// tokenization of the words containing them.
OsrResult over_split_rate(const MorphemeLexicon& lexicon, const BpeModel& model,
                          const std::vector<std::string>& eval_words, const MarkerRule& markers = {});

// IPS = 1 - sqrt((1-LMC)^2 + OSR^2) / sqrt(2); both inputs in [0, 1].
double integrated_performance_score(double lmc, double osr);

struct EvalReport {
    int64_t k = 0;
    double lmc = 0.0;
    double osr = 0.0;
    double ips = 0.0;
    std::vector<std::string> covered_morphemes;
    std::vector<std::string> oversplit_morphemes;
    int64_t osr_denominator = 0;

    // CSV row "k,lmc,osr,ips,osr_denominator"
    std::string csv_row() const;
};

EvalReport evaluate_model(const MorphemeLexicon& lexicon, const BpeModel& model,
                          const std::vector<std::string>& eval_words, const MarkerRule& markers = {});

} // namespace morphlex
