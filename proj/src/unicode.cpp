#include "morphlex/unicode.hpp"

#include "morphlex/errors.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace morphlex::uni {

namespace {

[[noreturn]] void bad_byte(std::size_t offset) {
    throw IoError("invalid UTF-8 byte sequence at byte offset " + std::to_string(offset));
}

// Decodes one code point starting at s[i]; advances i past it.
char32_t decode_one(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        bad_byte(i);
    }
    if (i + len > s.size()) bad_byte(i);
    for (int k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) bad_byte(i + k);
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len]) bad_byte(i);                  // overlong
    if (cp >= 0xD800 && cp <= 0xDFFF) bad_byte(i);    // surrogate
    if (cp > 0x10FFFF) bad_byte(i);
    i += len;
    return cp;
}

} // namespace

std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out.push_back(decode_one(s, i));
    return out;
}

std::string encode_utf8(char32_t c) {
    std::string out;
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
    return out;
}

std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : s) out += encode_utf8(c);
    return out;
}

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    try {
        while (i < s.size()) decode_one(s, i);
    } catch (const IoError&) {
        return false;
    }
    return true;
}

std::size_t length(std::string_view s) {
    std::size_t n = 0, i = 0;
    while (i < s.size()) {
        decode_one(s, i);
        ++n;
    }
    return n;
}

std::vector<std::size_t> boundaries(std::string_view s) {
    std::vector<std::size_t> b;
    b.reserve(s.size() + 1);
    std::size_t i = 0;
    while (i < s.size()) {
        b.push_back(i);
        decode_one(s, i);
    }
    b.push_back(s.size());
    return b;
}

std::string nfc(std::string_view s) {
    if (!valid_utf8(s)) decode_utf8(s); // throws with the offending offset
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw IoError("ICU NFC normalizer unavailable");
    icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
    icu::UnicodeString n = norm->normalize(u, status);
    if (U_FAILURE(status)) throw IoError("NFC normalization failed");
    std::string out;
    n.toUTF8String(out);
    return out;
}

bool is_upper(char32_t c) { return u_isupper(static_cast<UChar32>(c)); }
bool is_alpha(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
bool is_punct(char32_t c) { return u_ispunct(static_cast<UChar32>(c)); }
bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }
char32_t to_lower(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

std::string lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) out += encode_utf8(to_lower(decode_one(s, i)));
    return out;
}

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::u32string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        std::size_t lo = 0, hi = cur.size();
        while (lo < hi && is_punct(cur[lo])) ++lo;
        while (hi > lo && is_punct(cur[hi - 1])) --hi;
        if (hi > lo) words.push_back(encode_utf8(std::u32string_view(cur).substr(lo, hi - lo)));
        cur.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t c = decode_one(text, i);
        if (is_space(c)) {
            flush();
        } else {
            cur.push_back(c);
        }
    }
    flush();
    return words;
}

} // namespace morphlex::uni
