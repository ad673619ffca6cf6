#pragma once

#include "morphlex/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace morphlex {

// One token per line, optional leading hyphen (suffix marker) or trailing
// hyphen (prefix marker). Blank lines are skipped, surfaces NFC-normalized,
// order and duplicates preserved.
std::vector<Candidate> read_candidate_file(const std::filesystem::path& path);

// Inverse of read_candidate_file: surfaces re-serialized with markers.
void write_candidate_file(const std::filesystem::path& path, const std::vector<Candidate>& candidates);

// CSV "token,score", 12 significant digits, rows sorted by score descending
// then token ascending.
void write_score_table(const ScoreTable& table, const std::filesystem::path& path);
ScoreTable read_score_table(const std::filesystem::path& path);

// One morpheme per line, sorted ascending.
void write_lexicon(const MorphemeLexicon& lexicon, const std::filesystem::path& path);
MorphemeLexicon read_lexicon(const std::filesystem::path& path, std::string language_tag = "");

// JSON config with keys alphabet, whitelist, min_length, max_length,
// support_m, epsilon, max_iterations, otsu_bins. Missing keys keep defaults.
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);

} // namespace morphlex
