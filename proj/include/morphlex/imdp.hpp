#pragma once

#include "morphlex/support_index.hpp"
#include "morphlex/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace morphlex {

// Hard pre-filter: drops tokens with characters outside the alphabet,
// non-alphabetic characters, capitalized/acronym forms, and out-of-bounds
// lengths (single whitelisted characters survive the length rule).
std::vector<Candidate> prefilter(const std::vector<Candidate>& raw, const AlphabetConfig& cfg);

// Collapses duplicated surfaces (differing flags included) to one pool
// entry, keeping the first occurrence.
std::vector<Candidate> dedupe_surfaces(const std::vector<Candidate>& candidates);

// S_0(t) = 1 / |t| with |t| counted in Unicode scalar values.
ScoreTable initial_scores(const std::vector<Candidate>& pool);

// Best decomposition of `token` into >= 2 parts, all keys of `scores`,
// length-1 parts restricted to the whitelist, maximizing the score sum.
// Among equal sums the earliest-boundary decomposition wins. Returns
// nullopt when no valid decomposition exists; throws std::out_of_range
// when the token itself is not a key.
std::optional<Decomposition> best_explanation(std::string_view token, const ScoreTable& scores,
                                              const std::unordered_set<char32_t>& whitelist);

struct RefinementState {
    ScoreTable scores;
    ScoreTable initial_scores; // frozen S_0
    int iteration = 0;
    double last_max_delta = 0.0;
};

RefinementState make_initial_state(ScoreTable s0);

// One synchronous update: every token's BEP reads the previous iteration's
// table; tokens are penalized only when BEP exceeds their current score.
RefinementState refine_step(const RefinementState& state, const std::unordered_set<char32_t>& whitelist);

struct RefineParams {
    double epsilon = 1e-7;
    int max_iterations = 100;
};

enum class StopReason { Converged, MaxIterations };

struct RefinementRun {
    RefinementState state;
    StopReason stop_reason = StopReason::Converged;
    std::vector<double> max_delta_history;
};

// Iterates refine_step until the max absolute score change drops below
// epsilon or max_iterations is reached.
RefinementRun run_refinement(const std::vector<Candidate>& pool, const AlphabetConfig& cfg,
                             const RefineParams& params = {});

struct OtsuResult {
    double threshold = 0.0;
    int bin_count = 0;
    double inter_class_variance = 0.0;
};

// Histogram threshold maximizing the inter-class variance w0*w1*(mu0-mu1)^2
// over all interior bin boundaries; ties go to the lower threshold.
// Requires at least two distinct values.
OtsuResult otsu_threshold(const std::vector<double>& scores, int bins);

// All tokens with final score >= tau, sorted ascending.
MorphemeLexicon extract_lexicon(const RefinementState& state, const OtsuResult& otsu,
                                std::string language_tag = "");

struct ReductionStats {
    double percent = 0.0; // (1 - final/initial) * 100
    double factor = 0.0;  // initial / final
};

ReductionStats reduction_stats(int64_t initial_count, int64_t final_count);

} // namespace morphlex
