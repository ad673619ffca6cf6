#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace morphlex::uni {

// Strict UTF-8 decoding. Rejects overlong forms, surrogates and truncated
// sequences; the thrown IoError message contains the byte offset.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::string encode_utf8(char32_t c);
bool valid_utf8(std::string_view s);

// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t length(std::string_view s);

// Byte offsets of code point starts, plus s.size() as the final entry.
std::vector<std::size_t> boundaries(std::string_view s);

// Canonical composition (NFC). Input must be valid UTF-8.
std::string nfc(std::string_view s);

bool is_upper(char32_t c);
bool is_alpha(char32_t c);
bool is_punct(char32_t c);
bool is_space(char32_t c);
char32_t to_lower(char32_t c);

// Per-code-point simple lowercasing.
std::string lower(std::string_view s);

// Whitespace-separated words with punctuation stripped from the edges.
// Interior punctuation (hyphens, apostrophes) is kept.
std::vector<std::string> split_words(std::string_view text);

} // namespace morphlex::uni
