// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Invokes the CLI binary for the end-to-end criteria.

#include "morphlex/bpe.hpp"
#include "morphlex/curve.hpp"
#include "morphlex/errors.hpp"
#include "morphlex/imdp.hpp"
#include "morphlex/io.hpp"
#include "morphlex/metrics.hpp"
#include "morphlex/unicode.hpp"

#include "../unit/helpers.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace morphlex;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CheckFailure {
    std::string detail;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw CheckFailure{detail};
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

int run_cli(const std::string& args, const fs::path& cwd, const fs::path& stdout_file) {
    std::string cmd = "cd " + shell_quote(cwd.string()) + " && " + shell_quote(MORPHLEX_CLI) + " " + args;
    cmd += " > " + shell_quote(stdout_file.string());
    cmd += " 2> " + shell_quote((cwd / "stderr.log").string());
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

fs::path data_dir() { return fs::path(MORPHLEX_DATA_DIR); }

struct GridRow {
    int64_t k;
    double lmc, osr;
};

std::vector<GridRow> load_grid(const std::string& lang) {
    std::ifstream in(data_dir() / "grids" / (lang + ".csv"));
    require(in.good(), "cannot open bundled grid for " + lang);
    std::vector<GridRow> rows;
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        GridRow row{};
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        row.k = std::stoll(cell);
        std::getline(ss, cell, ',');
        row.lmc = std::stod(cell);
        std::getline(ss, cell, ',');
        row.osr = std::stod(cell);
        rows.push_back(row);
    }
    require(rows.size() == 15, lang + " grid should have 15 rows");
    return rows;
}

// ---------------------------------------------------------------------- A1 --

void a1_ips_golden() {
    struct Expectation {
        std::string lang;
        double start_ips; // at k=8000, negative = unchecked
        double max_ips;   // at k=256000
    };
    const std::vector<Expectation> expected{
        {"hu", 0.29, 0.73},
        {"et", 0.22, 0.39},
        {"fi", -1.0, 0.31},
    };
    for (const auto& e : expected) {
        const auto rows = load_grid(e.lang);
        double max_ips = -1.0;
        int64_t max_k = 0;
        double start = -1.0;
        for (const auto& row : rows) {
            const double ips = integrated_performance_score(row.lmc, row.osr);
            if (row.k == 8000) start = ips;
            if (ips > max_ips) {
                max_ips = ips;
                max_k = row.k;
            }
        }
        if (e.start_ips >= 0.0) {
            require(std::fabs(start - e.start_ips) <= 0.005,
                    e.lang + " start IPS " + std::to_string(start) + " != " + std::to_string(e.start_ips));
        }
        require(std::fabs(max_ips - e.max_ips) <= 0.005,
                e.lang + " max IPS " + std::to_string(max_ips) + " != " + std::to_string(e.max_ips));
        require(max_k == 256000, e.lang + " max IPS should sit at k=256000, got " + std::to_string(max_k));
    }
}

// ---------------------------------------------------------------------- A2 --

void a2_analysis_points() {
    struct Expectation {
        std::string lang;
        int64_t q90;
    };
    const fs::path dir = fs::temp_directory_path() / "morphlex_accept_a2";
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const auto& [lang, q90] : std::vector<Expectation>{{"hu", 128000}, {"et", 128000}, {"fi", 150000}}) {
        const auto out = dir / (lang + ".json");
        const int rc = run_cli("analyze --curve " + shell_quote((data_dir() / "grids" / (lang + ".csv")).string()),
                               dir, out);
        require(rc == 0, "analyze exited with " + std::to_string(rc) + " for " + lang);
        const auto j = json::parse(read_file(out));
        require(j.at("k_elbow").get<int64_t>() == 80000,
                lang + " k_elbow " + j.at("k_elbow").dump() + " != 80000");
        require(j.at("k_q90").get<int64_t>() == q90, lang + " k_q90 " + j.at("k_q90").dump());
        const auto range = j.at("recommended_range");
        require(range.at(0).get<int64_t>() == 80000 && range.at(1).get<int64_t>() == q90,
                lang + " recommended range " + range.dump());
    }
    fs::remove_all(dir);
}

// ---------------------------------------------------------------------- A3 --

struct SyntheticPool {
    std::vector<std::string> atoms;
    std::vector<std::string> concats;
    std::vector<Candidate> pool;
};

SyntheticPool make_synthetic(std::mt19937& rng) {
    auto word = [&](int lo, int hi) {
        std::uniform_int_distribution<int> len(lo, hi), chr(0, 25);
        std::string w;
        const int n = len(rng);
        for (int i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + chr(rng)));
        return w;
    };
    std::uniform_int_distribution<int> stems_n(5, 20), affixes_n(3, 6);
    const int R = stems_n(rng), S = affixes_n(rng);

    std::set<std::string> stems, affixes;
    while (static_cast<int>(stems.size()) < R) stems.insert(word(4, 6));
    while (static_cast<int>(affixes.size()) < S) {
        const auto a = word(3, 5);
        if (!stems.count(a)) affixes.insert(a);
    }
    std::set<std::string> atom_set(stems.begin(), stems.end());
    atom_set.insert(affixes.begin(), affixes.end());

    const std::vector<std::string> af(affixes.begin(), affixes.end());
    std::set<std::string> concat_set;
    int si = 0;
    for (const auto& stem : stems) {
        for (const auto& a : af) {
            const auto c2 = stem + a;
            if (!atom_set.count(c2)) concat_set.insert(c2);
        }
        for (int j = 0; j < 2; ++j) {
            const auto& a = af[(si + j) % af.size()];
            const auto& b = af[(si + j + 1) % af.size()];
            const auto c3 = stem + a + b;
            if (!atom_set.count(c3)) concat_set.insert(c3);
        }
        ++si;
    }

    SyntheticPool out;
    out.atoms.assign(atom_set.begin(), atom_set.end());
    out.concats.assign(concat_set.begin(), concat_set.end());
    for (const auto& s : atom_set) out.pool.push_back({s, false, false, CandidateSource::PlainList});
    for (const auto& s : concat_set) out.pool.push_back({s, false, false, CandidateSource::PlainList});
    return out;
}

void a3_synthetic_separation() {
    std::mt19937 rng(730124);
    AlphabetConfig cfg;
    for (char c = 'a'; c <= 'z'; ++c) cfg.valid_chars.insert(static_cast<char32_t>(c));

    int successes = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
        const auto synth = make_synthetic(rng);
        const auto run = run_refinement(synth.pool, cfg);
        const auto& final_scores = run.state.scores.entries;
        const auto& s0 = run.state.initial_scores.entries;

        const auto table0 = initial_scores(synth.pool);
        bool retains = true;
        double min_undecomposable = std::numeric_limits<double>::infinity();
        for (const auto& atom : synth.atoms) {
            if (!testutil::bep_brute_force(atom, table0, {}).has_value()) {
                if (final_scores.at(atom) != s0.at(atom)) retains = false;
                min_undecomposable = std::min(min_undecomposable, final_scores.at(atom));
            }
        }
        bool below = true;
        for (const auto& c : synth.concats) {
            if (!(final_scores.at(c) < min_undecomposable)) below = false;
        }

        std::vector<double> values;
        values.reserve(final_scores.size());
        for (const auto& [token, score] : final_scores) values.push_back(score);
        const auto otsu = otsu_threshold(values, 256);
        const auto lexicon = extract_lexicon(run.state, otsu);
        std::vector<std::string> expected = synth.atoms;
        std::sort(expected.begin(), expected.end());
        const bool exact = lexicon.morphemes == expected;

        if (retains && below && exact) ++successes;
    }
    std::cerr << "  (synthetic separations: " << successes << "/" << trials << ")\n";
    require(successes >= 95, "only " + std::to_string(successes) + "/100 synthetic constructions separated");
}

// ---------------------------------------------------------------------- A4 --

void a4_bep_oracle() {
    std::mt19937 rng(222444);
    int mismatches = 0;
    int pools = 0;
    while (pools < 1000) {
        std::vector<std::string> pool;
        std::unordered_set<std::string> seen;
        std::uniform_int_distribution<int> size_dist(3, 50);
        const int target = size_dist(rng);
        while (static_cast<int>(pool.size()) < target) {
            const auto w = testutil::random_word(rng, 1, 10, 3);
            if (seen.insert(w).second) pool.push_back(w);
        }
        ++pools;
        const auto table = initial_scores(testutil::as_candidates(pool));
        std::unordered_set<char32_t> whitelist;
        if (rng() % 2) whitelist.insert(U'a');
        if (rng() % 3 == 0) whitelist.insert(U'b');
        for (const auto& token : pool) {
            const auto dp = best_explanation(token, table, whitelist);
            const auto brute = testutil::bep_brute_force(token, table, whitelist);
            if (dp.has_value() != brute.has_value()) {
                ++mismatches;
                continue;
            }
            if (dp && dp->total_score != *brute) ++mismatches;
            if (dp) {
                std::string concat;
                for (const auto& part : dp->parts) {
                    concat += part;
                    if (uni::length(part) == 1 && !whitelist.count(uni::decode_utf8(part)[0])) ++mismatches;
                    if (!table.entries.count(part)) ++mismatches;
                }
                if (concat != token || dp->parts.size() < 2) ++mismatches;
            }
        }
    }
    require(mismatches == 0, std::to_string(mismatches) + " BEP mismatches against enumeration");
}

// ---------------------------------------------------------------------- A5 --

void a5_otsu_oracle() {
    std::mt19937 rng(555777);
    int mismatches = 0;
    for (int round = 0; round < 200; ++round) {
        std::vector<double> values;
        std::uniform_int_distribution<int> n_dist(2, 10000);
        const int n = n_dist(rng);
        const int kind = round % 4;
        std::normal_distribution<double> low(0.05, 0.02), high(0.4, 0.15);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        std::uniform_int_distribution<int> lattice(0, 12);
        for (int i = 0; i < n; ++i) {
            switch (kind) {
                case 0: values.push_back(i % 4 == 0 ? high(rng) : low(rng)); break;
                case 1: values.push_back(uniform(rng)); break;
                case 2: values.push_back(lattice(rng) / 12.0); break; // tie-heavy
                default: values.push_back(1.0 / (1 + i % 17)); break; // score-like
            }
        }
        double lo = values[0], hi = values[0];
        for (double v : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(hi > lo)) {
            --round;
            continue;
        }
        const auto result = otsu_threshold(values, 256);
        const auto oracle = testutil::otsu_brute_force(values, 256);
        if (result.threshold != oracle.threshold) ++mismatches;
    }
    require(mismatches == 0, std::to_string(mismatches) + " Otsu mismatches against exhaustive search");
}

// ---------------------------------------------------------------------- A6 --

void a6_support_oracle_and_scale() {
    std::mt19937 rng(987123);
    for (const int size : {50, 160, 333, 500}) {
        std::vector<std::string> surfaces;
        std::unordered_set<std::string> seen;
        while (static_cast<int>(surfaces.size()) < size) {
            const auto w = testutil::random_word(rng, 1, 14, 5);
            if (seen.insert(w).second) surfaces.push_back(w);
        }
        const auto index = SupportIndex::build(testutil::as_candidates(surfaces));
        const auto expected = testutil::support_brute_force(surfaces);
        for (std::size_t i = 0; i < surfaces.size(); ++i) {
            require(index.support(surfaces[i]) == expected[i],
                    "support mismatch on pool of " + std::to_string(size));
        }
    }

    // Table-1-scale pool: 500k candidates, mean length ~10
    std::vector<std::string> big;
    big.reserve(500000);
    std::unordered_set<std::string> seen;
    std::uniform_int_distribution<int> len_dist(5, 15);
    std::uniform_int_distribution<int> chr_dist(0, 19);
    while (big.size() < 500000) {
        std::string w;
        const int len = len_dist(rng);
        for (int i = 0; i < len; ++i) w.push_back(static_cast<char>('a' + chr_dist(rng)));
        if (seen.insert(w).second) big.push_back(std::move(w));
    }
    const auto start = std::chrono::steady_clock::now();
    const auto index = SupportIndex::build(testutil::as_candidates(big));
    int64_t checksum = 0;
    for (std::size_t i = 0; i < big.size(); ++i) checksum += index.support_by_id(i);
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start).count();
    require(elapsed < 300, "500k support pass took " + std::to_string(elapsed) + "s (budget 300s)");
    require(checksum >= 0, "impossible");
    // partial brute-force audit at full scale
    std::uniform_int_distribution<std::size_t> pick(0, big.size() - 1);
    for (int probe = 0; probe < 100; ++probe) {
        const auto& needle = big[pick(rng)];
        int64_t count = 0;
        for (const auto& hay : big) {
            if (hay.size() >= needle.size() && hay.find(needle) != std::string::npos) ++count;
        }
        require(index.support(needle) == count - 1, "support mismatch at 500k scale");
    }
    std::cerr << "  (500k-candidate support pass: " << elapsed << "s)\n";
}

// ---------------------------------------------------------------------- A7 --

void a7_bpe_properties() {
    WordCounts toy;
    toy.counts["low"] = 5;
    toy.counts["lower"] = 2;
    toy.counts["newest"] = 6;
    toy.counts["widest"] = 3;

    // brute-force pair count: the winner must be ("e","s") at 9
    std::map<std::pair<std::string, std::string>, int64_t> pairs;
    for (const auto& [word, freq] : toy.counts) {
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            pairs[{std::string(1, word[i]), std::string(1, word[i + 1])}] += freq;
        }
    }
    std::pair<std::string, std::string> best_pair;
    int64_t best_count = 0;
    for (const auto& [pair, count] : pairs) {
        if (count > best_count || (count == best_count && pair < best_pair)) {
            best_pair = pair;
            best_count = count;
        }
    }
    require(best_pair == std::make_pair(std::string("e"), std::string("s")) && best_count == 9,
            "toy corpus pair count oracle disagrees");
    const auto one_merge = train(toy, 11, 2); // 10 letters + 1 merge
    require(one_merge.merges->size() == 1 && (*one_merge.merges)[0] == MergePair{"e", "s"},
            "first trained merge is not (e, s)");

    // lossless round-trip on 10^4 random words
    const auto model = train(toy, 24, 2);
    const Encoder encoder(model);
    std::mt19937 rng(13579);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
    for (int i = 0; i < 10000; ++i) {
        std::string w;
        const int len = 1 + static_cast<int>(rng() % 14);
        for (int j = 0; j < len; ++j) w.push_back(alphabet[rng() % alphabet.size()]);
        std::string concat;
        for (const auto& piece : encoder.encode(w)) concat += piece.text;
        require(concat == w, "round-trip failed for \"" + w + "\"");
    }

    // nested vocabulary property on random counts
    for (int round = 0; round < 3; ++round) {
        WordCounts wc;
        for (int i = 0; i < 300; ++i) {
            wc.counts[testutil::random_word(rng, 2, 10, 6)] += 1 + static_cast<int>(rng() % 7);
        }
        const auto small = train(wc, 30, 2);
        const auto big = train(wc, 60, 2);
        require(small.merges->size() <= big.merges->size(), "nested: merge list shrank");
        for (std::size_t i = 0; i < small.merges->size(); ++i) {
            require((*small.merges)[i] == (*big.merges)[i], "nested: merge lists diverge");
        }
        for (const auto& [token, id] : small.vocab) {
            require(big.vocab.count(token) == 1, "nested: vocab not contained");
        }
    }
}

// ---------------------------------------------------------------------- A8 --

void a8_reduction_rows() {
    struct Row {
        int64_t initial, final_count;
        double percent, factor;
    };
    for (const auto& row : std::vector<Row>{{499647, 3850, 99.23, 129.8},
                                            {281256, 5705, 97.97, 49.3},
                                            {103317, 3189, 96.91, 32.4}}) {
        const auto stats = reduction_stats(row.initial, row.final_count);
        require(std::fabs(stats.percent - row.percent) <= 0.01,
                "percent " + std::to_string(stats.percent) + " != " + std::to_string(row.percent));
        require(std::fabs(stats.factor - row.factor) <= 0.1,
                "factor " + std::to_string(stats.factor) + " != " + std::to_string(row.factor));
    }
}

// ---------------------------------------------------------------------- A9 --

void a9_determinism() {
    const fs::path base = fs::temp_directory_path() / "morphlex_accept_a9";
    fs::remove_all(base);

    // one synthetic input set, copied into both run directories
    std::mt19937 rng(424242);
    const auto synth = make_synthetic(rng);
    std::string cand_text;
    for (const auto& c : synth.pool) cand_text += c.surface + "\n";
    std::string corpus_text;
    {
        std::vector<std::string> vocab_words = synth.concats;
        vocab_words.insert(vocab_words.end(), synth.atoms.begin(), synth.atoms.end());
        std::uniform_int_distribution<std::size_t> pick(0, vocab_words.size() - 1);
        for (int i = 0; i < 3000; ++i) {
            corpus_text += vocab_words[pick(rng)];
            corpus_text += (i % 12 == 11) ? '\n' : ' ';
        }
    }

    for (const std::string run : {"run1", "run2"}) {
        const auto dir = base / run;
        fs::create_directories(dir);
        write_file(dir / "cands.txt", cand_text);
        write_file(dir / "corpus.txt", corpus_text);
        write_file(dir / "words.txt", corpus_text);

        int rc = run_cli(
            "refine --cands cands.txt --alphabet abcdefghijklmnopqrstuvwxyz --support-m 0 "
            "--out-lexicon lex.txt --out-scores scores.csv --report report.json --language syn",
            dir, dir / "refine_stdout.json");
        require(rc == 0, run + ": refine exited with " + std::to_string(rc));
        rc = run_cli(
            "sweep --corpus corpus.txt --sizes 30,40,50 --lexicon lex.txt --words words.txt "
            "--out curve.csv",
            dir, dir / "sweep_stdout.json");
        require(rc == 0, run + ": sweep exited with " + std::to_string(rc));
        rc = run_cli("analyze --curve curve.csv --out analysis.json", dir, dir / "analyze_stdout.json");
        require(rc == 0, run + ": analyze exited with " + std::to_string(rc));
    }

    for (const std::string name : {"lex.txt", "scores.csv", "report.json", "curve.csv", "analysis.json",
                                   "refine_stdout.json", "sweep_stdout.json", "analyze_stdout.json"}) {
        const auto a = read_file(base / "run1" / name);
        const auto b = read_file(base / "run2" / name);
        require(!a.empty(), name + " is empty");
        require(a == b, name + " differs between identical runs");
    }
    fs::remove_all(base);
}

} // namespace

int main() {
    struct Criterion {
        std::string id;
        std::string label;
        std::function<void()> run;
    };
    const std::vector<Criterion> criteria{
        {"A1", "IPS formula reproduces the published curve endpoints", a1_ips_golden},
        {"A2", "curve analysis reproduces the published key points", a2_analysis_points},
        {"A3", "refinement separates planted atoms from concatenations", a3_synthetic_separation},
        {"A4", "best_explanation equals exhaustive enumeration", a4_bep_oracle},
        {"A5", "Otsu threshold equals exhaustive search", a5_otsu_oracle},
        {"A6", "support index equals brute force and scales to 500k", a6_support_oracle_and_scale},
        {"A7", "BPE round-trip, nested vocabularies, first toy merge", a7_bpe_properties},
        {"A8", "reduction arithmetic reproduces the published rows", a8_reduction_rows},
        {"A9", "full pipeline runs are byte-identical", a9_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        try {
            criterion.run();
            std::cout << "[PASS] " << criterion.id << " " << criterion.label << "\n";
        } catch (const CheckFailure& f) {
            ++failures;
            std::cout << "[FAIL] " << criterion.id << " " << criterion.label << ": " << f.detail << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] " << criterion.id << " " << criterion.label << ": unexpected error: " << e.what()
                      << "\n";
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
