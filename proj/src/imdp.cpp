#include "morphlex/imdp.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/unicode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace morphlex {

namespace {

constexpr double kNoDecomposition = -std::numeric_limits<double>::infinity();

} // namespace

std::vector<Candidate> prefilter(const std::vector<Candidate>& raw, const AlphabetConfig& cfg) {
    cfg.validate();
    std::vector<Candidate> kept;
    kept.reserve(raw.size());
    for (const auto& c : raw) {
        const std::u32string cps = uni::decode_utf8(c.surface);
        if (cps.empty()) continue;

        // proper noun / acronym heuristic, evaluated on the original casing
        if (uni::is_upper(cps.front())) continue;
        int uppercase = 0;
        for (char32_t cp : cps) uppercase += uni::is_upper(cp) ? 1 : 0;
        if (uppercase >= 2) continue;

        bool in_alphabet = true;
        bool alphabetic = true;
        for (char32_t cp : cps) {
            if (!cfg.valid_chars.count(cp)) in_alphabet = false;
            if (!uni::is_alpha(cp)) alphabetic = false;
        }
        if (!in_alphabet || !alphabetic) continue;

        const auto n = cps.size();
        const bool whitelisted_char = n == 1 && cfg.whitelist.count(cps.front()) > 0;
        if (!whitelisted_char &&
            (n < static_cast<std::size_t>(cfg.min_length) || n > static_cast<std::size_t>(cfg.max_length))) {
            continue;
        }
        kept.push_back(c);
    }
    return kept;
}

std::vector<Candidate> dedupe_surfaces(const std::vector<Candidate>& candidates) {
    std::vector<Candidate> out;
    out.reserve(candidates.size());
    std::unordered_set<std::string> seen;
    for (const auto& c : candidates) {
        if (seen.insert(c.surface).second) out.push_back(c);
    }
    return out;
}

ScoreTable initial_scores(const std::vector<Candidate>& pool) {
    if (pool.empty()) throw DegenerateDataError("empty candidate pool");
    ScoreTable table;
    table.iteration = 0;
    for (const auto& c : pool) {
        const auto len = uni::length(c.surface);
        if (len == 0) throw ConfigError("empty surface in pool");
        if (!table.entries.emplace(c.surface, 1.0 / static_cast<double>(len)).second) {
            throw ConfigError("duplicate surface in pool: \"" + c.surface + "\"");
        }
    }
    return table;
}

namespace {

// Lattice of in-pool substrings for one token set. Scores live in dense
// vectors parallel to `tokens`; every BEP reads a frozen score vector.
class PoolEngine {
public:
    PoolEngine(std::vector<std::string> tokens, const std::unordered_set<char32_t>& whitelist)
        : tokens_(std::move(tokens)) {
        index_.reserve(tokens_.size());
        for (std::size_t i = 0; i < tokens_.size(); ++i) {
            if (!index_.emplace(tokens_[i], static_cast<uint32_t>(i)).second) {
                throw ConfigError("duplicate surface in pool: \"" + tokens_[i] + "\"");
            }
        }
        edge_begin_.reserve(tokens_.size() + 1);
        edge_begin_.push_back(0);
        cp_count_.reserve(tokens_.size());
        for (const auto& token : tokens_) {
            const auto b = uni::boundaries(token);
            const std::size_t n = b.size() - 1;
            if (n > 0xFFFF) throw ConfigError("token too long: \"" + token + "\"");
            cp_count_.push_back(static_cast<uint32_t>(n));
            for (std::size_t i = 0; i + 1 <= n; ++i) {
                for (std::size_t j = i + 1; j <= n; ++j) {
                    if (i == 0 && j == n) continue; // the token itself is not a part
                    const std::string_view seg(token.data() + b[i], b[j] - b[i]);
                    if (j - i == 1 && !whitelist.count(uni::decode_utf8(seg)[0])) continue;
                    const auto it = index_.find(seg);
                    if (it == index_.end()) continue;
                    edges_.push_back({static_cast<uint16_t>(i), static_cast<uint16_t>(j), it->second});
                }
            }
            // edges are generated with ascending (from, to) already
            edge_begin_.push_back(static_cast<uint32_t>(edges_.size()));
        }
    }

    std::size_t size() const { return tokens_.size(); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    // BEP of token t against `scores`; kNoDecomposition when nothing covers it.
    double bep(std::size_t t, const std::vector<double>& scores, std::vector<double>& sdp) const {
        const std::size_t n = cp_count_[t];
        if (n < 2) return kNoDecomposition;
        const std::size_t eb = edge_begin_[t], ee = edge_begin_[t + 1];
        if (eb == ee) return kNoDecomposition;
        sdp.assign(n + 1, kNoDecomposition);
        sdp[n] = 0.0;
        std::size_t hi = ee;
        for (std::size_t i = n; i-- > 0;) {
            std::size_t lo = hi;
            while (lo > eb && edges_[lo - 1].from == i) --lo;
            double best = kNoDecomposition;
            for (std::size_t e = lo; e < hi; ++e) {
                if (sdp[edges_[e].to] == kNoDecomposition) continue;
                const double v = scores[edges_[e].part] + sdp[edges_[e].to];
                if (v > best) best = v;
            }
            if (i == 0) return best; // the (0, n) edge was excluded at build
            sdp[i] = best;
            hi = lo;
        }
        return kNoDecomposition; // not reached, n >= 2
    }

    // One synchronous refinement step. Returns the max absolute change.
    double step(const std::vector<double>& s0, const std::vector<double>& prev, std::vector<double>& next) const {
        next.resize(prev.size());
        std::vector<double> sdp;
        double max_delta = 0.0;
        for (std::size_t t = 0; t < tokens_.size(); ++t) {
            const double b = bep(t, prev, sdp);
            if (b == kNoDecomposition || b <= prev[t]) {
                next[t] = prev[t];
            } else {
                next[t] = s0[t] / (1.0 + b);
            }
            const double d = std::fabs(next[t] - prev[t]);
            if (d > max_delta) max_delta = d;
        }
        return max_delta;
    }

private:
    struct Edge {
        uint16_t from, to;
        uint32_t part;
    };

    std::vector<std::string> tokens_;
    std::unordered_map<std::string_view, uint32_t> index_;
    std::vector<uint32_t> edge_begin_;
    std::vector<Edge> edges_;
    std::vector<uint32_t> cp_count_;
};

std::vector<std::string> sorted_keys(const ScoreTable& table) {
    std::vector<std::string> keys;
    keys.reserve(table.entries.size());
    for (const auto& [k, v] : table.entries) keys.push_back(k);
    return keys;
}

} // namespace

std::optional<Decomposition> best_explanation(std::string_view token, const ScoreTable& scores,
                                              const std::unordered_set<char32_t>& whitelist) {
    const auto self = scores.entries.find(token);
    if (self == scores.entries.end()) {
        throw std::out_of_range("token not in score table: \"" + std::string(token) + "\"");
    }
    const auto b = uni::boundaries(token);
    const std::size_t n = b.size() - 1;
    if (n < 2) return std::nullopt;

    // score of segment [i, j) if it is a legal part, else nullopt
    auto seg_score = [&](std::size_t i, std::size_t j) -> std::optional<double> {
        if (i == 0 && j == n) return std::nullopt;
        const std::string_view seg(token.data() + b[i], b[j] - b[i]);
        if (j - i == 1 && !whitelist.count(uni::decode_utf8(seg)[0])) return std::nullopt;
        const auto it = scores.entries.find(seg);
        if (it == scores.entries.end()) return std::nullopt;
        return it->second;
    };

    std::vector<double> sdp(n + 1, kNoDecomposition);
    sdp[n] = 0.0;
    for (std::size_t i = n; i-- > 1;) {
        double best = kNoDecomposition;
        for (std::size_t j = i + 1; j <= n; ++j) {
            if (sdp[j] == kNoDecomposition) continue;
            if (const auto s = seg_score(i, j)) {
                const double v = *s + sdp[j];
                if (v > best) best = v;
            }
        }
        sdp[i] = best;
    }
    double total = kNoDecomposition;
    for (std::size_t j = 1; j < n; ++j) {
        if (sdp[j] == kNoDecomposition) continue;
        if (const auto s = seg_score(0, j)) {
            const double v = *s + sdp[j];
            if (v > total) total = v;
        }
    }
    if (total == kNoDecomposition) return std::nullopt;

    // earliest-boundary reconstruction: always take the shortest segment
    // that still reaches the optimal sum
    Decomposition out;
    out.total_score = total;
    std::size_t i = 0;
    double remaining = total;
    while (i < n) {
        const std::size_t j_max = i == 0 ? n - 1 : n;
        bool advanced = false;
        for (std::size_t j = i + 1; j <= j_max; ++j) {
            const double tail = sdp[j];
            if (tail == kNoDecomposition) continue;
            if (const auto s = seg_score(i, j)) {
                if (*s + tail == remaining) {
                    out.parts.emplace_back(token.substr(b[i], b[j] - b[i]));
                    remaining = tail;
                    i = j;
                    advanced = true;
                    break;
                }
            }
        }
        if (!advanced) throw std::logic_error("decomposition reconstruction failed");
    }
    return out;
}

RefinementState make_initial_state(ScoreTable s0) {
    RefinementState state;
    state.initial_scores = s0;
    state.scores = std::move(s0);
    state.iteration = 0;
    state.last_max_delta = 0.0;
    return state;
}

RefinementState refine_step(const RefinementState& state, const std::unordered_set<char32_t>& whitelist) {
    if (state.scores.entries.size() != state.initial_scores.entries.size()) {
        throw ConfigError("scores and initial_scores must share one key set");
    }
    PoolEngine engine(sorted_keys(state.scores), whitelist);
    std::vector<double> prev, s0;
    prev.reserve(engine.size());
    s0.reserve(engine.size());
    for (const auto& token : engine.tokens()) {
        prev.push_back(state.scores.entries.at(token));
        const auto it = state.initial_scores.entries.find(token);
        if (it == state.initial_scores.entries.end()) {
            throw ConfigError("scores and initial_scores must share one key set");
        }
        s0.push_back(it->second);
    }
    std::vector<double> next;
    const double delta = engine.step(s0, prev, next);

    RefinementState out;
    out.initial_scores = state.initial_scores;
    out.iteration = state.iteration + 1;
    out.last_max_delta = delta;
    out.scores.iteration = out.iteration;
    for (std::size_t t = 0; t < engine.size(); ++t) {
        out.scores.entries.emplace(engine.tokens()[t], next[t]);
    }
    return out;
}

RefinementRun run_refinement(const std::vector<Candidate>& pool, const AlphabetConfig& cfg,
                             const RefineParams& params) {
    if (params.max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    ScoreTable s0 = initial_scores(pool); // throws on empty/duplicate pool

    PoolEngine engine(sorted_keys(s0), cfg.whitelist);
    std::vector<double> init;
    init.reserve(engine.size());
    for (const auto& token : engine.tokens()) init.push_back(s0.entries.at(token));

    RefinementRun run;
    std::vector<double> prev = init, next;
    int iteration = 0;
    double delta = 0.0;
    for (;;) {
        delta = engine.step(init, prev, next);
        ++iteration;
        run.max_delta_history.push_back(delta);
        prev.swap(next);
        if (delta < params.epsilon) {
            run.stop_reason = StopReason::Converged;
            break;
        }
        if (iteration >= params.max_iterations) {
            run.stop_reason = StopReason::MaxIterations;
            break;
        }
    }

    run.state.initial_scores = std::move(s0);
    run.state.iteration = iteration;
    run.state.last_max_delta = delta;
    run.state.scores.iteration = iteration;
    for (std::size_t t = 0; t < engine.size(); ++t) {
        run.state.scores.entries.emplace(engine.tokens()[t], prev[t]);
    }
    return run;
}

namespace {

// Exact comparison of (d0*n1 - d1*n0)^2 / (n0*n1) fractions via 256-bit
// cross multiplication; all quantities derive from int64 histogram sums.
struct SplitScore {
    unsigned __int128 num; // squared moment difference
    unsigned __int128 den; // n0 * n1, zero for splits with an empty class
};

struct U256 {
    unsigned __int128 hi, lo;
};

U256 mul_u128(unsigned __int128 a, unsigned __int128 b) {
    const auto a0 = static_cast<uint64_t>(a), a1 = static_cast<uint64_t>(a >> 64);
    const auto b0 = static_cast<uint64_t>(b), b1 = static_cast<uint64_t>(b >> 64);
    const unsigned __int128 p00 = static_cast<unsigned __int128>(a0) * b0;
    const unsigned __int128 p01 = static_cast<unsigned __int128>(a0) * b1;
    const unsigned __int128 p10 = static_cast<unsigned __int128>(a1) * b0;
    const unsigned __int128 p11 = static_cast<unsigned __int128>(a1) * b1;
    unsigned __int128 mid = p01 + p10;
    unsigned __int128 carry = mid < p01 ? (static_cast<unsigned __int128>(1) << 64) : 0;
    unsigned __int128 lo = p00 + (mid << 64);
    unsigned __int128 lo_carry = lo < p00 ? 1 : 0;
    unsigned __int128 hi = p11 + (mid >> 64) + carry + lo_carry;
    return {hi, lo};
}

// a.num/a.den > b.num/b.den, exact
bool greater(const SplitScore& a, const SplitScore& b) {
    if (a.den == 0) return false;           // empty class never wins
    if (b.den == 0) return a.num > 0;
    const U256 left = mul_u128(a.num, b.den);
    const U256 right = mul_u128(b.num, a.den);
    if (left.hi != right.hi) return left.hi > right.hi;
    return left.lo > right.lo;
}

} // namespace

OtsuResult otsu_threshold(const std::vector<double>& scores, int bins) {
    if (bins < 2) throw ConfigError("otsu bins must be >= 2");
    if (scores.empty()) throw DegenerateDataError("no scores to threshold");
    const auto [min_it, max_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *min_it, hi = *max_it;
    if (!(hi > lo)) throw DegenerateDataError("otsu needs at least two distinct values");

    std::vector<int64_t> hist(bins, 0);
    for (double v : scores) {
        auto idx = static_cast<int64_t>((v - lo) / (hi - lo) * bins);
        if (idx < 0) idx = 0;
        if (idx >= bins) idx = bins - 1;
        ++hist[idx];
    }

    const auto n = static_cast<int64_t>(scores.size());
    int64_t moment_total = 0;
    for (int i = 0; i < bins; ++i) moment_total += static_cast<int64_t>(i) * hist[i];

    int best_boundary = -1;
    SplitScore best{0, 0};
    int64_t n0 = 0, m0 = 0;
    for (int i = 1; i < bins; ++i) {
        n0 += hist[i - 1];
        m0 += static_cast<int64_t>(i - 1) * hist[i - 1];
        const int64_t n1 = n - n0;
        const int64_t m1 = moment_total - m0;
        SplitScore s{0, 0};
        if (n0 > 0 && n1 > 0) {
            const __int128 diff = static_cast<__int128>(m0) * n1 - static_cast<__int128>(m1) * n0;
            const unsigned __int128 mag = diff < 0 ? static_cast<unsigned __int128>(-diff)
                                                   : static_cast<unsigned __int128>(diff);
            s.num = mag * mag;
            s.den = static_cast<unsigned __int128>(n0) * static_cast<unsigned __int128>(n1);
        }
        if (best_boundary == -1 || greater(s, best)) {
            best = s;
            best_boundary = i;
        }
    }

    const double width = (hi - lo) / bins;
    OtsuResult result;
    result.bin_count = bins;
    result.threshold = lo + best_boundary * width;

    // report the variance in score units, using bin centers
    int64_t rn0 = 0, rm_count = 0;
    double sum0 = 0.0, sum1 = 0.0;
    for (int i = 0; i < bins; ++i) {
        const double center = lo + (i + 0.5) * width;
        if (i < best_boundary) {
            rn0 += hist[i];
            sum0 += center * static_cast<double>(hist[i]);
        } else {
            rm_count += hist[i];
            sum1 += center * static_cast<double>(hist[i]);
        }
    }
    if (rn0 > 0 && rm_count > 0) {
        const double w0 = static_cast<double>(rn0) / static_cast<double>(n);
        const double w1 = static_cast<double>(rm_count) / static_cast<double>(n);
        const double mu0 = sum0 / static_cast<double>(rn0);
        const double mu1 = sum1 / static_cast<double>(rm_count);
        result.inter_class_variance = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    return result;
}

MorphemeLexicon extract_lexicon(const RefinementState& state, const OtsuResult& otsu, std::string language_tag) {
    MorphemeLexicon lex;
    lex.threshold_used = otsu.threshold;
    lex.language_tag = std::move(language_tag);
    for (const auto& [token, score] : state.scores.entries) {
        if (score >= otsu.threshold) lex.morphemes.push_back(token);
    }
    return lex; // map iteration is already ascending
}

ReductionStats reduction_stats(int64_t initial_count, int64_t final_count) {
    if (initial_count <= 0) throw ConfigError("initial count must be positive");
    if (final_count <= 0) throw ConfigError("final count must be positive");
    ReductionStats stats;
    const double ratio = static_cast<double>(final_count) / static_cast<double>(initial_count);
    stats.percent = (1.0 - ratio) * 100.0;
    stats.factor = static_cast<double>(initial_count) / static_cast<double>(final_count);
    return stats;
}

} // namespace morphlex
