#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace morphlex {

struct MergePair {
    std::string left, right;
    bool operator==(const MergePair&) const = default;
};

// Character-level BPE model: no end-of-word or continuation markers.
// Vocabulary ids are dense, alphabet first, then merge products in order.
struct BpeModel {
    std::map<std::string, int64_t, std::less<>> vocab;
    std::optional<std::vector<MergePair>> merges; // absent for vocab-only imports
    int64_t vocab_size_target = 0;

    bool encode_capable() const { return merges.has_value(); }
};

struct WordCounts {
    std::map<std::string, int64_t> counts;
};

// Whitespace-split words with edge punctuation stripped, counted.
WordCounts count_words(std::istream& in);
WordCounts count_words_text(std::string_view text);

// Greedy BPE training: repeatedly merge the most frequent adjacent pair,
// ties broken by lexicographic (left, right) order; stops at vocab size k
// or when no pair reaches min_frequency. Merges never cross word boundaries.
BpeModel train(const WordCounts& counts, int64_t k, int64_t min_frequency);

struct EncodedToken {
    std::string text;
    bool known = true; // false for characters absent from the vocabulary
    bool operator==(const EncodedToken&) const = default;
};

// Splits into characters then applies merges by rank. Unknown characters
// pass through as flagged singleton tokens.
std::vector<EncodedToken> encode(const BpeModel& model, std::string_view word);

// Same as encode() with the merge-rank table built once. The model must
// outlive the encoder.
class Encoder {
public:
    explicit Encoder(const BpeModel& model);
    std::vector<EncodedToken> encode(std::string_view word) const;

private:
    const BpeModel& model_;
    std::map<std::pair<std::string_view, std::string_view>, std::size_t> rank_;
};

// JSON model file: {"vocab": {token: id, ...}, "merges": ["left right", ...],
// "vocab_size_target": k}. merges and vocab_size_target are optional.
BpeModel import_vocab(const std::filesystem::path& path);
void write_model(const BpeModel& model, const std::filesystem::path& path);

// Plain-text merge list, one "left right" pair per line.
void write_merges_file(const BpeModel& model, const std::filesystem::path& path);
std::vector<MergePair> read_merges_file(const std::filesystem::path& path);

} // namespace morphlex
