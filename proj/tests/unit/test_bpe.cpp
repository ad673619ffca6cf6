#include "morphlex/bpe.hpp"
#include "morphlex/errors.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace morphlex;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("morphlex_bpe_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path file(const std::string& name) const { return path / name; }
};

WordCounts toy_corpus() {
    WordCounts wc;
    wc.counts["low"] = 5;
    wc.counts["lower"] = 2;
    wc.counts["newest"] = 6;
    wc.counts["widest"] = 3;
    return wc;
}

// independent pair-count oracle: all adjacent pairs, overlaps included
std::map<std::pair<std::string, std::string>, int64_t> pair_counts_oracle(const WordCounts& wc) {
    std::map<std::pair<std::string, std::string>, int64_t> counts;
    for (const auto& [word, freq] : wc.counts) {
        const auto cps = uni::decode_utf8(word);
        for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
            counts[{uni::encode_utf8(cps[i]), uni::encode_utf8(cps[i + 1])}] += freq;
        }
    }
    return counts;
}

std::string concat(const std::vector<EncodedToken>& tokens) {
    std::string s;
    for (const auto& t : tokens) s += t.text;
    return s;
}

} // namespace

TEST_CASE("count_words: counting with punctuation stripping") {
    std::istringstream in("low low lower");
    const auto wc = count_words(in);
    CHECK(wc.counts.at("low") == 2);
    CHECK(wc.counts.at("lower") == 1);

    std::istringstream in2("a. a");
    CHECK(count_words(in2).counts.at("a") == 2);

    std::istringstream empty("");
    CHECK(count_words(empty).counts.empty());
}

TEST_CASE("train: overlapping pairs counted, first merge on aaab") {
    WordCounts wc;
    wc.counts["aaab"] = 2;
    // alphabet {a, b}; one merge allowed
    const auto model = train(wc, 3, 2);
    REQUIRE(model.merges.has_value());
    REQUIRE(model.merges->size() == 1);
    CHECK((*model.merges)[0] == MergePair{"a", "a"}); // pair frequency 4
    CHECK(model.vocab.count("aa") == 1);
}

TEST_CASE("train: toy corpus first merge is (e, s) at frequency 9") {
    const auto wc = toy_corpus();
    const auto oracle = pair_counts_oracle(wc);
    int64_t best_count = 0;
    std::pair<std::string, std::string> best_pair;
    for (const auto& [pair, count] : oracle) {
        if (count > best_count || (count == best_count && pair < best_pair)) {
            best_count = count;
            best_pair = pair;
        }
    }
    CHECK(best_count == 9);
    CHECK(best_pair == std::make_pair(std::string("e"), std::string("s")));

    std::size_t alphabet = 0;
    {
        std::set<char> chars;
        for (const auto& [w, f] : wc.counts) chars.insert(w.begin(), w.end());
        alphabet = chars.size();
    }
    const auto model = train(wc, static_cast<int64_t>(alphabet) + 1, 2);
    REQUIRE(model.merges->size() == 1);
    CHECK((*model.merges)[0] == MergePair{"e", "s"});
}

TEST_CASE("train: min_frequency floor blocks unique pairs") {
    WordCounts wc;
    wc.counts["abc"] = 1;
    wc.counts["def"] = 1;
    const auto model = train(wc, 100, 2);
    CHECK(model.merges->empty());
    CHECK(model.vocab.size() == 6); // alphabet only
}

TEST_CASE("train: k below the alphabet size is an error") {
    WordCounts wc;
    wc.counts["abcdef"] = 3;
    CHECK_THROWS_AS(train(wc, 3, 2), ConfigError);
}

TEST_CASE("train: vocabulary ids are dense, alphabet first") {
    const auto model = train(toy_corpus(), 15, 2);
    std::vector<int64_t> ids;
    for (const auto& [tok, id] : model.vocab) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) REQUIRE(ids[i] == static_cast<int64_t>(i));
    for (const auto& m : *model.merges) REQUIRE(model.vocab.count(m.left + m.right) == 1);
}

TEST_CASE("encode: merge application by rank") {
    BpeModel model;
    model.vocab = {{"a", 0}, {"b", 1}, {"aa", 2}, {"aab", 3}};
    model.merges = std::vector<MergePair>{{"a", "a"}, {"aa", "b"}};
    const auto tokens = encode(model, "aab");
    REQUIRE(tokens.size() == 1);
    CHECK(tokens[0].text == "aab");
    CHECK(tokens[0].known);

    CHECK(encode(model, "").empty());
    const auto single = encode(model, "a");
    REQUIRE(single.size() == 1);
    CHECK(single[0].text == "a");
}

TEST_CASE("encode: unknown characters pass through flagged") {
    BpeModel model;
    model.vocab = {{"a", 0}};
    model.merges = std::vector<MergePair>{};
    const auto tokens = encode(model, "axa");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0].known);
    CHECK_FALSE(tokens[1].known);
    CHECK(tokens[1].text == "x");
    CHECK(tokens[2].known);
}

TEST_CASE("encode: vocab-only model refuses") {
    BpeModel model;
    model.vocab = {{"a", 0}};
    CHECK_THROWS_AS(encode(model, "a"), ConfigError);
}

TEST_CASE("round-trip: concatenated encodings reproduce the word") {
    const auto model = train(toy_corpus(), 20, 2);
    const Encoder encoder(model);
    std::mt19937 rng(88);
    for (int i = 0; i < 1000; ++i) {
        std::string w;
        const char alphabet[] = "deilnorstw"; // letters of the toy corpus
        const int len = 1 + static_cast<int>(rng() % 12);
        for (int j = 0; j < len; ++j) w.push_back(alphabet[rng() % 10]);
        CHECK(concat(encoder.encode(w)) == w);
    }
    CHECK(concat(encoder.encode("слово")) == "слово"); // unknown script passes through
}

TEST_CASE("nested vocabularies: smaller k gives a prefix of the merge list") {
    std::mt19937 rng(7);
    WordCounts wc;
    for (int i = 0; i < 200; ++i) {
        wc.counts[testutil::random_word(rng, 2, 9, 5)] += 1 + static_cast<int>(rng() % 9);
    }
    const auto big = train(wc, 80, 2);
    const auto small = train(wc, 40, 2);
    REQUIRE(small.merges->size() <= big.merges->size());
    for (std::size_t i = 0; i < small.merges->size(); ++i) {
        REQUIRE((*small.merges)[i] == (*big.merges)[i]);
    }
    for (const auto& [tok, id] : small.vocab) REQUIRE(big.vocab.count(tok) == 1);
}

TEST_CASE("training is deterministic") {
    const auto a = train(toy_corpus(), 18, 2);
    const auto b = train(toy_corpus(), 18, 2);
    CHECK(a.vocab == b.vocab);
    CHECK(*a.merges == *b.merges);
}

TEST_CASE("model JSON round-trip") {
    TempDir dir;
    const auto model = train(toy_corpus(), 16, 2);
    write_model(model, dir.file("m.json"));
    const auto back = import_vocab(dir.file("m.json"));
    CHECK(back.vocab == model.vocab);
    CHECK(*back.merges == *model.merges);
    CHECK(back.vocab_size_target == 16);
}

TEST_CASE("import_vocab: contract errors") {
    TempDir dir;
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir.file(name));
        out << body;
    };
    write("ok.json", R"({"vocab":{"a":0,"b":1,"ab":2},"merges":["a b"]})");
    const auto model = import_vocab(dir.file("ok.json"));
    CHECK(model.vocab.size() == 3);
    CHECK(model.encode_capable());

    write("vocab_only.json", R"({"vocab":{"a":0,"b":1}})");
    const auto lmc_only = import_vocab(dir.file("vocab_only.json"));
    CHECK_FALSE(lmc_only.encode_capable());
    CHECK_THROWS_AS(encode(lmc_only, "ab"), ConfigError);

    write("dup.json", R"({"vocab":{"a":0,"b":0}})");
    CHECK_THROWS_AS(import_vocab(dir.file("dup.json")), IoError);
    write("gap.json", R"({"vocab":{"a":0,"b":7}})");
    CHECK_THROWS_AS(import_vocab(dir.file("gap.json")), IoError);
    write("broken.json", "{");
    CHECK_THROWS_AS(import_vocab(dir.file("broken.json")), IoError);
    write("badmerge.json", R"({"vocab":{"a":0},"merges":["a b c"]})");
    CHECK_THROWS_AS(import_vocab(dir.file("badmerge.json")), IoError);
}

TEST_CASE("merges text file round-trip") {
    TempDir dir;
    const auto model = train(toy_corpus(), 16, 2);
    write_merges_file(model, dir.file("merges.txt"));
    const auto merges = read_merges_file(dir.file("merges.txt"));
    CHECK(merges == *model.merges);
}
