#include "morphlex/support_index.hpp"

#include "morphlex/errors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace morphlex {

namespace {

// Build-time trie with left-child/right-sibling links; converted to CSR
// afterwards so matching needs no per-node containers.
struct BuildTrie {
    std::vector<int32_t> first_child{-1};
    std::vector<int32_t> next_sib{-1};
    std::vector<unsigned char> in_byte{0};
    std::vector<int32_t> pattern{-1};

    int32_t child(int32_t node, unsigned char b) const {
        for (int32_t c = first_child[node]; c != -1; c = next_sib[c]) {
            if (in_byte[c] == b) return c;
        }
        return -1;
    }

    int32_t add_child(int32_t node, unsigned char b) {
        const auto id = static_cast<int32_t>(first_child.size());
        first_child.push_back(-1);
        next_sib.push_back(first_child[node]);
        in_byte.push_back(b);
        pattern.push_back(-1);
        first_child[node] = id;
        return id;
    }
};

} // namespace

AhoCorasick::AhoCorasick(const std::vector<std::string>& patterns) {
    pattern_count_ = patterns.size();
    BuildTrie trie;
    std::size_t total_bytes = 0;
    for (const auto& p : patterns) total_bytes += p.size();
    trie.first_child.reserve(total_bytes + 1);
    trie.next_sib.reserve(total_bytes + 1);
    trie.in_byte.reserve(total_bytes + 1);
    trie.pattern.reserve(total_bytes + 1);

    for (std::size_t id = 0; id < patterns.size(); ++id) {
        const auto& p = patterns[id];
        if (p.empty()) throw ConfigError("empty pattern");
        int32_t node = 0;
        for (unsigned char b : p) {
            int32_t next = trie.child(node, b);
            if (next == -1) next = trie.add_child(node, b);
            node = next;
        }
        if (trie.pattern[node] != -1) throw ConfigError("duplicate pattern \"" + p + "\"");
        trie.pattern[node] = static_cast<int32_t>(id);
    }

    const auto n = static_cast<int32_t>(trie.first_child.size());
    pattern_ = std::move(trie.pattern);
    fail_.assign(n, 0);
    dict_.assign(n, -1);
    stamp_.assign(n, -1);

    // CSR edges, sorted by byte per node
    edge_begin_.assign(n + 1, 0);
    for (int32_t v = 0; v < n; ++v) {
        for (int32_t c = trie.first_child[v]; c != -1; c = trie.next_sib[c]) ++edge_begin_[v + 1];
    }
    std::partial_sum(edge_begin_.begin(), edge_begin_.end(), edge_begin_.begin());
    edge_byte_.resize(edge_begin_[n]);
    edge_child_.resize(edge_begin_[n]);
    {
        std::vector<int32_t> fill(edge_begin_.begin(), edge_begin_.end() - 1);
        for (int32_t v = 0; v < n; ++v) {
            for (int32_t c = trie.first_child[v]; c != -1; c = trie.next_sib[c]) {
                edge_byte_[fill[v]] = trie.in_byte[c];
                edge_child_[fill[v]] = c;
                ++fill[v];
            }
            const auto lo = edge_begin_[v], hi = edge_begin_[v + 1];
            std::vector<std::pair<unsigned char, int32_t>> tmp;
            tmp.reserve(hi - lo);
            for (int32_t i = lo; i < hi; ++i) tmp.emplace_back(edge_byte_[i], edge_child_[i]);
            std::sort(tmp.begin(), tmp.end());
            for (int32_t i = lo; i < hi; ++i) {
                edge_byte_[i] = tmp[i - lo].first;
                edge_child_[i] = tmp[i - lo].second;
            }
        }
    }

    // BFS fail and dict links
    std::queue<int32_t> bfs;
    for (int32_t i = edge_begin_[0]; i < edge_begin_[1]; ++i) {
        fail_[edge_child_[i]] = 0;
        bfs.push(edge_child_[i]);
    }
    while (!bfs.empty()) {
        const int32_t v = bfs.front();
        bfs.pop();
        const int32_t f = fail_[v];
        dict_[v] = pattern_[f] != -1 ? f : dict_[f];
        for (int32_t i = edge_begin_[v]; i < edge_begin_[v + 1]; ++i) {
            const unsigned char b = edge_byte_[i];
            const int32_t child = edge_child_[i];
            fail_[child] = step(f, b);
            bfs.push(child);
        }
    }
}

int32_t AhoCorasick::step(int32_t node, unsigned char byte) const {
    for (;;) {
        const auto lo = edge_begin_[node], hi = edge_begin_[node + 1];
        const auto it = std::lower_bound(edge_byte_.begin() + lo, edge_byte_.begin() + hi, byte);
        if (it != edge_byte_.begin() + hi && *it == byte) {
            return edge_child_[it - edge_byte_.begin()];
        }
        if (node == 0) return 0;
        node = fail_[node];
    }
}

void AhoCorasick::contained_ids(std::string_view text, std::vector<uint32_t>& out) const {
    const int32_t gen = generation_++;
    int32_t node = 0;
    for (unsigned char b : text) {
        node = step(node, b);
        int32_t u = pattern_[node] != -1 ? node : dict_[node];
        while (u != -1 && stamp_[u] != gen) {
            stamp_[u] = gen;
            out.push_back(static_cast<uint32_t>(pattern_[u]));
            u = dict_[u];
        }
    }
}

SupportIndex SupportIndex::build(std::vector<Candidate> candidates) {
    SupportIndex index;
    index.candidates_ = std::move(candidates);
    std::vector<std::string> surfaces;
    surfaces.reserve(index.candidates_.size());
    for (const auto& c : index.candidates_) surfaces.push_back(c.surface);

    index.by_surface_.reserve(surfaces.size());
    for (std::size_t i = 0; i < index.candidates_.size(); ++i) {
        if (!index.by_surface_.emplace(index.candidates_[i].surface, i).second) {
            throw ConfigError("duplicate candidate surface \"" + index.candidates_[i].surface + "\"");
        }
    }

    index.counts_.assign(surfaces.size(), 0);
    if (surfaces.empty()) return index;

    const AhoCorasick matcher(surfaces);
    std::vector<uint32_t> hits;
    for (const auto& s : surfaces) {
        hits.clear();
        matcher.contained_ids(s, hits);
        for (uint32_t id : hits) ++index.counts_[id];
    }
    // every surface contains itself; report only the other candidates
    for (auto& c : index.counts_) --c;
    return index;
}

int64_t SupportIndex::support(std::string_view surface) const {
    const auto it = by_surface_.find(surface);
    if (it == by_surface_.end()) {
        throw std::out_of_range("surface not in support index: \"" + std::string(surface) + "\"");
    }
    return counts_[it->second];
}

std::vector<Candidate> support_filter(const SupportIndex& index, int64_t m) {
    std::vector<Candidate> kept;
    const auto& cands = index.candidates();
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (index.support_by_id(i) >= m) kept.push_back(cands[i]);
    }
    return kept;
}

} // namespace morphlex
