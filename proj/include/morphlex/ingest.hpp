#pragma once

#include "morphlex/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace morphlex {

struct DicEntry {
    std::string stem;
    std::string flags; // opaque text after the '/' separator
};

enum class AffixKind { Prefix, Suffix };

struct AffRule {
    AffixKind kind;
    std::string affix_string;
};

// Hunspell .dic: the count line is skipped and not trusted; morph fields
// after whitespace are dropped. Warnings (count mismatch) land in *warnings
// when given, on stderr otherwise.
std::vector<DicEntry> parse_dic(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

// Hunspell .aff: only PFX/SFX rule lines are consumed; the add string is
// harvested with '/' continuation flags stripped. Everything else is ignored.
std::vector<AffRule> parse_aff(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

// Stems become unmarked candidates, affix rules marked ones; the union is
// deduplicated on (surface, flags) preserving first occurrence.
std::vector<Candidate> merge_candidates(const std::vector<DicEntry>& stems, const std::vector<AffRule>& affixes);

// Whitespace-split words, edge punctuation stripped, deduplicated in
// first-seen order, truncated at cap.
std::vector<std::string> load_wordlist(const std::filesystem::path& path,
                                       std::optional<std::size_t> cap = std::nullopt);

} // namespace morphlex
