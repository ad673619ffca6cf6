#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace morphlex {

enum class CandidateSource { DicStem, AffEntry, PlainList };

// A surface form flowing through the refinement pipeline. Hyphen affix
// markers are stripped at parse time and kept as flags.
struct Candidate {
    std::string surface;
    bool is_prefix_marked = false; // had a trailing hyphen ("ta-")
    bool is_suffix_marked = false; // had a leading hyphen ("-ssa")
    CandidateSource source = CandidateSource::PlainList;

    bool operator==(const Candidate&) const = default;
};

// Language alphabet, length bounds and the single-character whitelist.
struct AlphabetConfig {
    std::unordered_set<char32_t> valid_chars;
    int min_length = 1;
    int max_length = 30;
    std::unordered_set<char32_t> whitelist;

    // Throws ConfigError when the whitelist leaves the alphabet or the
    // length bounds are inconsistent.
    void validate() const;
};

// Per-iteration atomicity scores, keyed by surface.
struct ScoreTable {
    std::map<std::string, double, std::less<>> entries;
    int iteration = 0;
};

struct MorphemeLexicon {
    std::vector<std::string> morphemes; // sorted ascending, unique
    double threshold_used = 0.0;
    std::string language_tag;
};

// An optimal split of a token into pool members.
struct Decomposition {
    std::vector<std::string> parts; // ≥ 2, concatenation equals the token
    double total_score = 0.0;
};

// Pipeline parameters as carried by the JSON config file.
struct PipelineConfig {
    AlphabetConfig alphabet;
    int64_t support_m = 3;
    double epsilon = 1e-7;
    int max_iterations = 100;
    int otsu_bins = 256;

    void validate() const;
};

} // namespace morphlex
