#pragma once

#include "morphlex/types.hpp"
#include "morphlex/unicode.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace testutil {

// --- brute-force BEP oracle -------------------------------------------------
// Enumerates every segmentation recursively, no memoization. Sums are built
// suffix-first (score(first) + best(rest)) so they are comparable with the
// DP bit for bit.

inline std::optional<double> bep_enumerate_from(const std::string& token, const std::vector<std::size_t>& b,
                                                std::size_t i, const morphlex::ScoreTable& scores,
                                                const std::unordered_set<char32_t>& whitelist) {
    const std::size_t n = b.size() - 1;
    if (i == n) return 0.0;
    std::optional<double> best;
    for (std::size_t j = i + 1; j <= n; ++j) {
        if (i == 0 && j == n) continue; // single-segment split is not a decomposition
        const std::string seg = token.substr(b[i], b[j] - b[i]);
        if (j - i == 1 && !whitelist.count(morphlex::uni::decode_utf8(seg)[0])) continue;
        const auto it = scores.entries.find(seg);
        if (it == scores.entries.end()) continue;
        const auto rest = bep_enumerate_from(token, b, j, scores, whitelist);
        if (!rest) continue;
        const double v = it->second + *rest;
        if (!best || v > *best) best = v;
    }
    return best;
}

inline std::optional<double> bep_brute_force(const std::string& token, const morphlex::ScoreTable& scores,
                                             const std::unordered_set<char32_t>& whitelist) {
    const auto b = morphlex::uni::boundaries(token);
    if (b.size() - 1 < 2) return std::nullopt;
    return bep_enumerate_from(token, b, 0, scores, whitelist);
}

// --- brute-force Otsu oracle ------------------------------------------------
// Same histogram, but every split is evaluated from scratch with exact
// integer arithmetic. Safe for n <= ~1e6 and bins <= 256.

struct OtsuOracleResult {
    int boundary = -1; // histogram boundary index
    double threshold = 0.0;
};

inline OtsuOracleResult otsu_brute_force(const std::vector<double>& values, int bins) {
    double lo = values.front(), hi = values.front();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<int64_t> hist(bins, 0);
    for (double v : values) {
        auto idx = static_cast<int64_t>((v - lo) / (hi - lo) * bins);
        if (idx < 0) idx = 0;
        if (idx >= bins) idx = bins - 1;
        ++hist[idx];
    }
    int best = -1;
    __int128 best_num = 0;
    __int128 best_den = 0; // fraction num/den, den 0 = empty class
    for (int i = 1; i < bins; ++i) {
        int64_t n0 = 0, m0 = 0, n1 = 0, m1 = 0;
        for (int j = 0; j < i; ++j) {
            n0 += hist[j];
            m0 += static_cast<int64_t>(j) * hist[j];
        }
        for (int j = i; j < bins; ++j) {
            n1 += hist[j];
            m1 += static_cast<int64_t>(j) * hist[j];
        }
        __int128 num = 0, den = 0;
        if (n0 > 0 && n1 > 0) {
            const __int128 diff = static_cast<__int128>(m0) * n1 - static_cast<__int128>(m1) * n0;
            num = diff * diff;
            den = static_cast<__int128>(n0) * n1;
        }
        bool better;
        if (best == -1) {
            better = true;
        } else if (den == 0) {
            better = false;
        } else if (best_den == 0) {
            better = num > 0;
        } else {
            better = num * best_den > best_num * den;
        }
        if (better) {
            best = i;
            best_num = num;
            best_den = den;
        }
    }
    // same boundary-to-threshold formula as the implementation; the oracle
    // independently establishes WHICH boundary wins
    return {best, lo + best * ((hi - lo) / bins)};
}

// --- brute-force support oracle ----------------------------------------------

inline std::vector<int64_t> support_brute_force(const std::vector<std::string>& surfaces) {
    std::vector<int64_t> counts(surfaces.size(), 0);
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
        for (std::size_t j = 0; j < surfaces.size(); ++j) {
            if (i == j) continue;
            if (surfaces[j].find(surfaces[i]) != std::string::npos) ++counts[i];
        }
    }
    return counts;
}

// --- deterministic random data -----------------------------------------------

inline std::string random_word(std::mt19937& rng, int min_len, int max_len, int alphabet_size) {
    std::uniform_int_distribution<int> len_dist(min_len, max_len);
    std::uniform_int_distribution<int> chr_dist(0, alphabet_size - 1);
    std::string w;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + chr_dist(rng)));
    return w;
}

inline std::vector<morphlex::Candidate> as_candidates(const std::vector<std::string>& surfaces) {
    std::vector<morphlex::Candidate> out;
    out.reserve(surfaces.size());
    for (const auto& s : surfaces) out.push_back({s, false, false, morphlex::CandidateSource::PlainList});
    return out;
}

} // namespace testutil
