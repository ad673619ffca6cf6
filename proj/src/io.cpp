#include "morphlex/io.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/unicode.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace morphlex {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

void strip_bom(std::string& line) {
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

std::string format_score(double s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", s);
    return buf;
}

} // namespace

std::vector<Candidate> read_candidate_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::vector<Candidate> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) strip_bom(line);
        strip_cr(line);
        if (line.empty()) continue;
        Candidate c;
        std::string body = line;
        if (body.front() == '-') {
            c.is_suffix_marked = true;
            body.erase(0, 1);
        }
        if (!body.empty() && body.back() == '-') {
            c.is_prefix_marked = true;
            body.pop_back();
        }
        if (body.empty()) continue; // bare marker line carries no surface
        try {
            c.surface = uni::nfc(body);
        } catch (const IoError& e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        c.source = CandidateSource::PlainList;
        out.push_back(std::move(c));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return out;
}

void write_candidate_file(const std::filesystem::path& path, const std::vector<Candidate>& candidates) {
    auto out = open_output(path);
    for (const auto& c : candidates) {
        if (c.is_suffix_marked) out << '-';
        out << c.surface;
        if (c.is_prefix_marked) out << '-';
        out << '\n';
    }
    if (!out) throw IoError("write failure on " + path.string());
}

void write_score_table(const ScoreTable& table, const std::filesystem::path& path) {
    std::vector<std::pair<std::string_view, double>> rows;
    rows.reserve(table.entries.size());
    for (const auto& [token, score] : table.entries) rows.emplace_back(token, score);
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    auto out = open_output(path);
    out << "token,score\n";
    for (const auto& [token, score] : rows) out << token << ',' << format_score(score) << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

ScoreTable read_score_table(const std::filesystem::path& path) {
    auto in = open_input(path);
    ScoreTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            strip_bom(line);
            strip_cr(line);
            if (line != "token,score") throw IoError(path.string() + ":1: expected header \"token,score\"");
            continue;
        }
        strip_cr(line);
        if (line.empty()) continue;
        const auto comma = line.rfind(',');
        if (comma == std::string::npos || comma == 0) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        }
        const std::string token = line.substr(0, comma);
        double score = 0.0;
        try {
            score = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed score");
        }
        if (!(score > 0.0) || score > 1.0 + 1e-12) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": score out of range (0, 1]");
        }
        std::size_t cps = 0;
        try {
            cps = uni::length(token);
        } catch (const IoError& e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (cps == 0 || score > (1.0 / static_cast<double>(cps)) * (1.0 + 1e-12)) {
            throw IoError(path.string() + ":" + std::to_string(lineno) +
                          ": score exceeds the initial inverse-length bound");
        }
        if (!table.entries.emplace(token, score).second) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": duplicate token \"" + token + "\"");
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return table;
}

void write_lexicon(const MorphemeLexicon& lexicon, const std::filesystem::path& path) {
    std::vector<std::string> sorted = lexicon.morphemes;
    std::sort(sorted.begin(), sorted.end());
    auto out = open_output(path);
    for (const auto& m : sorted) out << m << '\n';
    if (!out) throw IoError("write failure on " + path.string());
}

MorphemeLexicon read_lexicon(const std::filesystem::path& path, std::string language_tag) {
    auto in = open_input(path);
    MorphemeLexicon lex;
    lex.language_tag = std::move(language_tag);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) strip_bom(line);
        strip_cr(line);
        if (line.empty()) continue;
        try {
            lex.morphemes.push_back(uni::nfc(line));
        } catch (const IoError& e) {
            throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    std::sort(lex.morphemes.begin(), lex.morphemes.end());
    lex.morphemes.erase(std::unique(lex.morphemes.begin(), lex.morphemes.end()), lex.morphemes.end());
    if (lex.morphemes.empty()) throw DegenerateDataError("lexicon file " + path.string() + " holds no morphemes");
    return lex;
}

namespace {

std::unordered_set<char32_t> parse_charset(const nlohmann::json& j, const std::string& key) {
    std::unordered_set<char32_t> set;
    if (j.is_string()) {
        for (char32_t c : uni::decode_utf8(j.get<std::string>())) set.insert(c);
    } else if (j.is_array()) {
        for (const auto& item : j) {
            if (!item.is_string()) throw ConfigError("config key \"" + key + "\" must hold strings");
            const auto cps = uni::decode_utf8(uni::nfc(item.get<std::string>()));
            if (key == "whitelist" && cps.size() != 1) {
                throw ConfigError("whitelist entries must be single characters, got \"" + item.get<std::string>() + "\"");
            }
            for (char32_t c : cps) set.insert(c);
        }
    } else {
        throw ConfigError("config key \"" + key + "\" must be a string or an array of strings");
    }
    return set;
}

} // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    auto in = open_input(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed JSON in " + path.string() + ": " + e.what());
    }
    PipelineConfig cfg;
    try {
        if (j.contains("alphabet")) {
            const auto raw = j.at("alphabet");
            cfg.alphabet.valid_chars =
                parse_charset(raw.is_string() ? nlohmann::json(uni::nfc(raw.get<std::string>())) : raw, "alphabet");
        }
        if (j.contains("whitelist")) cfg.alphabet.whitelist = parse_charset(j.at("whitelist"), "whitelist");
        if (j.contains("min_length")) cfg.alphabet.min_length = j.at("min_length").get<int>();
        if (j.contains("max_length")) cfg.alphabet.max_length = j.at("max_length").get<int>();
        if (j.contains("support_m")) cfg.support_m = j.at("support_m").get<int64_t>();
        if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
        if (j.contains("max_iterations")) cfg.max_iterations = j.at("max_iterations").get<int>();
        if (j.contains("otsu_bins")) cfg.otsu_bins = j.at("otsu_bins").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad config value in " + path.string() + ": " + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    std::vector<std::string> alphabet;
    for (char32_t c : cfg.alphabet.valid_chars) alphabet.push_back(uni::encode_utf8(c));
    std::sort(alphabet.begin(), alphabet.end());
    std::string alphabet_str;
    for (const auto& s : alphabet) alphabet_str += s;
    std::vector<std::string> whitelist;
    for (char32_t c : cfg.alphabet.whitelist) whitelist.push_back(uni::encode_utf8(c));
    std::sort(whitelist.begin(), whitelist.end());
    nlohmann::json j{
        {"alphabet", alphabet_str},
        {"whitelist", whitelist},
        {"min_length", cfg.alphabet.min_length},
        {"max_length", cfg.alphabet.max_length},
        {"support_m", cfg.support_m},
        {"epsilon", cfg.epsilon},
        {"max_iterations", cfg.max_iterations},
        {"otsu_bins", cfg.otsu_bins},
    };
    return j.dump();
}

} // namespace morphlex
