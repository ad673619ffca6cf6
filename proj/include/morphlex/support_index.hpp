#pragma once

#include "morphlex/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace morphlex {

// Multi-pattern substring matcher (Aho-Corasick over UTF-8 bytes).
// Patterns must be distinct and non-empty. Queries reuse internal stamp
// buffers, so concurrent queries on one instance are not allowed.
class AhoCorasick {
public:
    explicit AhoCorasick(const std::vector<std::string>& patterns);

    std::size_t pattern_count() const { return pattern_count_; }

    // Appends to `out` the id of every distinct pattern occurring in `text`
    // as a contiguous substring.
    void contained_ids(std::string_view text, std::vector<uint32_t>& out) const;

private:
    int32_t step(int32_t node, unsigned char byte) const;

    // trie in CSR form, edges sorted by byte per node
    std::vector<int32_t> edge_begin_;
    std::vector<unsigned char> edge_byte_;
    std::vector<int32_t> edge_child_;
    std::vector<int32_t> fail_;
    std::vector<int32_t> dict_;    // nearest proper fail-ancestor holding a pattern
    std::vector<int32_t> pattern_; // pattern id at node, -1 if none
    std::size_t pattern_count_ = 0;

    mutable std::vector<int32_t> stamp_;
    mutable int32_t generation_ = 0;
};

// Precomputed type-support counts: support(t) = number of OTHER candidates
// whose surface contains t as a contiguous substring.
class SupportIndex {
public:
    // Throws ConfigError on duplicate surfaces (callers dedupe the pool first).
    static SupportIndex build(std::vector<Candidate> candidates);

    SupportIndex(SupportIndex&&) = default;
    SupportIndex& operator=(SupportIndex&&) = default;
    SupportIndex(const SupportIndex&) = delete; // by_surface_ views candidates_
    SupportIndex& operator=(const SupportIndex&) = delete;

    int64_t support(std::string_view surface) const; // throws std::out_of_range on unknown
    int64_t support_by_id(std::size_t id) const { return counts_[id]; }
    const std::vector<Candidate>& candidates() const { return candidates_; }

private:
    SupportIndex() = default;

    std::vector<Candidate> candidates_;
    std::vector<int64_t> counts_;
    std::unordered_map<std::string_view, std::size_t> by_surface_;
};

// Keeps exactly the candidates with support >= m.
std::vector<Candidate> support_filter(const SupportIndex& index, int64_t m);

} // namespace morphlex
