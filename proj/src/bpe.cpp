#include "morphlex/bpe.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/unicode.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace morphlex {

WordCounts count_words_text(std::string_view text) {
    if (!uni::valid_utf8(text)) uni::decode_utf8(text); // throws with byte offset
    WordCounts wc;
    for (auto& w : uni::split_words(text)) ++wc.counts[uni::nfc(w)];
    return wc;
}

WordCounts count_words(std::istream& in) {
    std::stringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on word stream");
    std::string text = buf.str();
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
    return count_words_text(text);
}

namespace {

using PairKey = uint64_t;

PairKey key_of(uint32_t a, uint32_t b) { return (static_cast<uint64_t>(a) << 32) | b; }

struct Trainer {
    std::vector<std::string> symbols;               // id -> string, append only
    std::vector<std::vector<uint32_t>> words;       // symbol sequences
    std::vector<int64_t> word_freq;
    std::unordered_map<PairKey, int64_t> pair_count;
    std::unordered_map<PairKey, std::set<uint32_t>> pair_words;

    // heap of (count, pair) with lazy invalidation; best = highest count,
    // then lexicographically smallest (left, right)
    struct HeapEntry {
        int64_t count;
        PairKey key;
    };
    struct HeapCmp {
        const Trainer* t;
        bool operator()(const HeapEntry& a, const HeapEntry& b) const {
            if (a.count != b.count) return a.count < b.count;
            const auto al = static_cast<uint32_t>(a.key >> 32), ar = static_cast<uint32_t>(a.key);
            const auto bl = static_cast<uint32_t>(b.key >> 32), br = static_cast<uint32_t>(b.key);
            if (t->symbols[al] != t->symbols[bl]) return t->symbols[al] > t->symbols[bl];
            return t->symbols[ar] > t->symbols[br];
        }
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapCmp> heap;

    explicit Trainer() : heap(HeapCmp{this}) {}

    void bump(PairKey key, int64_t delta, uint32_t word_id) {
        auto& c = pair_count[key];
        c += delta;
        if (delta > 0) pair_words[key].insert(word_id);
        // push on decrements too, so the heap always holds the live count
        if (c > 0) heap.push({c, key});
    }

    void add_word_pairs(uint32_t w, int64_t sign) {
        const auto& seq = words[w];
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
            bump(key_of(seq[i], seq[i + 1]), sign * word_freq[w], w);
        }
    }
};

} // namespace

BpeModel train(const WordCounts& counts, int64_t k, int64_t min_frequency) {
    Trainer tr;

    // base alphabet: distinct code points across all words, sorted
    std::set<std::string> alphabet;
    for (const auto& [word, freq] : counts.counts) {
        if (freq < 1) throw ConfigError("word counts must be >= 1");
        for (char32_t c : uni::decode_utf8(word)) alphabet.insert(uni::encode_utf8(c));
    }
    if (k < static_cast<int64_t>(alphabet.size())) {
        throw ConfigError("vocab size " + std::to_string(k) + " is smaller than the alphabet (" +
                          std::to_string(alphabet.size()) + ")");
    }

    BpeModel model;
    model.vocab_size_target = k;
    model.merges.emplace();
    std::unordered_map<std::string, uint32_t> sym_id;
    for (const auto& s : alphabet) {
        const auto id = static_cast<uint32_t>(tr.symbols.size());
        tr.symbols.push_back(s);
        sym_id.emplace(s, id);
        model.vocab.emplace(s, static_cast<int64_t>(id));
    }

    tr.words.reserve(counts.counts.size());
    tr.word_freq.reserve(counts.counts.size());
    for (const auto& [word, freq] : counts.counts) {
        std::vector<uint32_t> seq;
        for (char32_t c : uni::decode_utf8(word)) seq.push_back(sym_id.at(uni::encode_utf8(c)));
        tr.words.push_back(std::move(seq));
        tr.word_freq.push_back(freq);
    }
    for (uint32_t w = 0; w < tr.words.size(); ++w) tr.add_word_pairs(w, +1);

    while (static_cast<int64_t>(model.vocab.size()) < k && !tr.heap.empty()) {
        const auto top = tr.heap.top();
        tr.heap.pop();
        const auto it = tr.pair_count.find(top.key);
        if (it == tr.pair_count.end() || it->second != top.count) continue; // stale
        if (top.count < min_frequency || top.count <= 0) continue;

        const auto left_id = static_cast<uint32_t>(top.key >> 32);
        const auto right_id = static_cast<uint32_t>(top.key);
        const std::string merged = tr.symbols[left_id] + tr.symbols[right_id];

        uint32_t merged_id;
        if (const auto existing = sym_id.find(merged); existing != sym_id.end()) {
            merged_id = existing->second; // product already a symbol, no new vocab entry
        } else {
            merged_id = static_cast<uint32_t>(tr.symbols.size());
            tr.symbols.push_back(merged);
            sym_id.emplace(merged, merged_id);
            model.vocab.emplace(merged, static_cast<int64_t>(merged_id));
        }
        model.merges->push_back({tr.symbols[left_id], tr.symbols[right_id]});

        const auto touched_it = tr.pair_words.find(top.key);
        if (touched_it == tr.pair_words.end()) continue;
        const std::vector<uint32_t> touched(touched_it->second.begin(), touched_it->second.end());
        for (uint32_t w : touched) {
            auto& seq = tr.words[w];
            bool contains = false;
            for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
                if (seq[i] == left_id && seq[i + 1] == right_id) {
                    contains = true;
                    break;
                }
            }
            if (!contains) continue;
            tr.add_word_pairs(w, -1);
            std::vector<uint32_t> rewritten;
            rewritten.reserve(seq.size());
            for (std::size_t i = 0; i < seq.size();) {
                if (i + 1 < seq.size() && seq[i] == left_id && seq[i + 1] == right_id) {
                    rewritten.push_back(merged_id);
                    i += 2;
                } else {
                    rewritten.push_back(seq[i]);
                    ++i;
                }
            }
            seq = std::move(rewritten);
            tr.add_word_pairs(w, +1);
        }
        tr.pair_count.erase(top.key);
        tr.pair_words.erase(top.key);
    }
    return model;
}

Encoder::Encoder(const BpeModel& model) : model_(model) {
    if (!model.encode_capable()) throw ConfigError("model has no merge list; encoding is unavailable");
    for (std::size_t r = 0; r < model.merges->size(); ++r) {
        rank_.emplace(std::make_pair(std::string_view((*model.merges)[r].left),
                                     std::string_view((*model.merges)[r].right)),
                      r);
    }
}

std::vector<EncodedToken> Encoder::encode(std::string_view word) const {
    std::vector<EncodedToken> pieces;
    for (char32_t c : uni::decode_utf8(word)) {
        std::string s = uni::encode_utf8(c);
        const bool known = model_.vocab.find(s) != model_.vocab.end();
        pieces.push_back({std::move(s), known});
    }
    if (pieces.size() < 2) return pieces;

    for (;;) {
        std::size_t best_rank = SIZE_MAX;
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
            const auto it = rank_.find({std::string_view(pieces[i].text), std::string_view(pieces[i + 1].text)});
            if (it != rank_.end() && it->second < best_rank) best_rank = it->second;
        }
        if (best_rank == SIZE_MAX) break;
        const auto& m = (*model_.merges)[best_rank];
        std::vector<EncodedToken> next;
        next.reserve(pieces.size());
        for (std::size_t i = 0; i < pieces.size();) {
            if (i + 1 < pieces.size() && pieces[i].text == m.left && pieces[i + 1].text == m.right) {
                std::string merged = m.left + m.right;
                const bool known = model_.vocab.find(merged) != model_.vocab.end();
                next.push_back({std::move(merged), known});
                i += 2;
            } else {
                next.push_back(std::move(pieces[i]));
                ++i;
            }
        }
        pieces = std::move(next);
    }
    return pieces;
}

std::vector<EncodedToken> encode(const BpeModel& model, std::string_view word) {
    return Encoder(model).encode(word);
}

BpeModel import_vocab(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("vocab") || !j.at("vocab").is_object()) {
        throw IoError(path.string() + ": expected an object with a \"vocab\" map");
    }
    BpeModel model;
    std::unordered_set<int64_t> ids;
    for (const auto& [token, id] : j.at("vocab").items()) {
        if (!id.is_number_integer()) throw IoError(path.string() + ": vocab ids must be integers");
        const auto value = id.get<int64_t>();
        if (!ids.insert(value).second) {
            throw IoError(path.string() + ": duplicate vocab id " + std::to_string(value));
        }
        std::string norm = uni::nfc(token);
        if (!model.vocab.emplace(std::move(norm), value).second) {
            throw IoError(path.string() + ": duplicate vocab token \"" + token + "\"");
        }
    }
    if (model.vocab.empty()) throw IoError(path.string() + ": empty vocabulary");
    for (int64_t id : ids) {
        if (id < 0 || id >= static_cast<int64_t>(model.vocab.size())) {
            throw IoError(path.string() + ": vocab ids must be dense 0.." +
                          std::to_string(model.vocab.size() - 1) + ", got " + std::to_string(id));
        }
    }
    if (j.contains("merges")) {
        if (!j.at("merges").is_array()) throw IoError(path.string() + ": \"merges\" must be an array");
        model.merges.emplace();
        for (const auto& entry : j.at("merges")) {
            if (!entry.is_string()) throw IoError(path.string() + ": merge entries must be strings");
            const std::string s = entry.get<std::string>();
            const auto space = s.find(' ');
            if (space == std::string::npos || space == 0 || space + 1 >= s.size() ||
                s.find(' ', space + 1) != std::string::npos) {
                throw IoError(path.string() + ": merge entry \"" + s + "\" is not \"left right\"");
            }
            model.merges->push_back({uni::nfc(s.substr(0, space)), uni::nfc(s.substr(space + 1))});
        }
    }
    model.vocab_size_target = j.value("vocab_size_target", static_cast<int64_t>(model.vocab.size()));
    return model;
}

void write_model(const BpeModel& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["vocab"] = nlohmann::json::object();
    for (const auto& [token, id] : model.vocab) j["vocab"][token] = id;
    if (model.merges) {
        j["merges"] = nlohmann::json::array();
        for (const auto& m : *model.merges) j["merges"].push_back(m.left + " " + m.right);
    }
    j["vocab_size_target"] = model.vocab_size_target;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

void write_merges_file(const BpeModel& model, const std::filesystem::path& path) {
    if (!model.merges) throw ConfigError("model has no merge list");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& m : *model.merges) out << m.left << ' ' << m.right << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

std::vector<MergePair> read_merges_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<MergePair> merges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto space = line.find(' ');
        if (space == std::string::npos || space == 0 || space + 1 >= line.size() ||
            line.find(' ', space + 1) != std::string::npos) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected \"left right\"");
        }
        merges.push_back({uni::nfc(line.substr(0, space)), uni::nfc(line.substr(space + 1))});
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return merges;
}

} // namespace morphlex
