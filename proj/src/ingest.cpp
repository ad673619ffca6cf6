#include "morphlex/ingest.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/unicode.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

namespace morphlex {

namespace {

void emit_warning(std::vector<std::string>* warnings, std::string msg) {
    if (warnings) {
        warnings->push_back(std::move(msg));
    } else {
        std::cerr << "warning: " << msg << '\n';
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

void strip_bom(std::string& line) {
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

std::string normalized(const std::filesystem::path& path, std::size_t lineno, std::string_view text) {
    try {
        return uni::nfc(text);
    } catch (const IoError& e) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
}

} // namespace

std::vector<DicEntry> parse_dic(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    auto in = open_input(path);
    std::vector<DicEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    std::optional<long long> declared;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) strip_bom(line);
        strip_cr(line);
        if (lineno == 1) {
            std::string trimmed = line;
            trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
            if (all_digits(trimmed)) {
                declared = std::stoll(trimmed);
                continue;
            }
            emit_warning(warnings, path.string() + ": first line is not an entry count; treating it as an entry");
        }
        if (line.empty()) continue;
        // drop morph fields after the first whitespace
        const auto ws = line.find_first_of(" \t");
        std::string entry = ws == std::string::npos ? line : line.substr(0, ws);
        if (entry.empty()) continue;
        DicEntry e;
        const auto slash = entry.find('/');
        if (slash == std::string::npos) {
            e.stem = entry;
        } else {
            e.stem = entry.substr(0, slash);
            e.flags = entry.substr(slash + 1);
        }
        if (e.stem.empty()) continue;
        e.stem = normalized(path, lineno, e.stem);
        entries.push_back(std::move(e));
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    if (lineno == 0) throw IoError(path.string() + " is empty");
    if (declared && *declared != static_cast<long long>(entries.size())) {
        emit_warning(warnings, path.string() + ": declared " + std::to_string(*declared) + " entries, found " +
                                   std::to_string(entries.size()));
    }
    return entries;
}

std::vector<AffRule> parse_aff(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    (void)warnings;
    auto in = open_input(path);
    std::vector<AffRule> rules;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) strip_bom(line);
        strip_cr(line);
        const auto f = fields(line);
        if (f.size() < 4) continue;
        AffixKind kind;
        if (f[0] == "SFX") {
            kind = AffixKind::Suffix;
        } else if (f[0] == "PFX") {
            kind = AffixKind::Prefix;
        } else {
            continue;
        }
        // header line: "SFX flag Y/N count"
        if (f.size() == 4 && (f[2] == "Y" || f[2] == "N") && all_digits(f[3])) continue;
        std::string add = f[3];
        const auto slash = add.find('/');
        if (slash != std::string::npos) add.erase(slash);
        if (add.empty() || add == "0") continue; // rule adds nothing
        rules.push_back({kind, normalized(path, lineno, add)});
    }
    if (in.bad()) throw IoError("read failure on " + path.string());
    return rules;
}

std::vector<Candidate> merge_candidates(const std::vector<DicEntry>& stems, const std::vector<AffRule>& affixes) {
    std::vector<Candidate> merged;
    merged.reserve(stems.size() + affixes.size());
    std::unordered_set<std::string> seen; // key: surface + flag bits
    auto push = [&](Candidate c) {
        std::string key = c.surface;
        key.push_back(c.is_prefix_marked ? 'P' : 'p');
        key.push_back(c.is_suffix_marked ? 'S' : 's');
        if (seen.insert(std::move(key)).second) merged.push_back(std::move(c));
    };
    for (const auto& s : stems) {
        push({s.stem, false, false, CandidateSource::DicStem});
    }
    for (const auto& a : affixes) {
        Candidate c;
        c.surface = a.affix_string;
        c.source = CandidateSource::AffEntry;
        if (a.kind == AffixKind::Prefix) {
            c.is_prefix_marked = true;
        } else {
            c.is_suffix_marked = true;
        }
        push(std::move(c));
    }
    return merged;
}

std::vector<std::string> load_wordlist(const std::filesystem::path& path, std::optional<std::size_t> cap) {
    auto in = open_input(path);
    std::stringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure on " + path.string());
    std::string text = buf.str();
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
    if (!uni::valid_utf8(text)) {
        uni::decode_utf8(text); // throws with byte offset
    }
    std::vector<std::string> words;
    std::unordered_set<std::string> seen;
    for (auto& w : uni::split_words(text)) {
        if (cap && words.size() >= *cap) break;
        std::string norm = uni::nfc(w);
        if (seen.insert(norm).second) words.push_back(std::move(norm));
    }
    return words;
}

} // namespace morphlex
