#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace corpusfit {

// Decodes the code point starting at s[i]; advances i past it. Returns false
// on malformed UTF-8 (overlong forms, bad continuation bytes, surrogates).
bool utf8_next(std::string_view s, std::size_t& i, char32_t& cp);

void append_utf8(std::string& out, char32_t cp);

// Unicode general categories P* (punctuation) and Nd (decimal digit), from a
// compiled-in range table covering the common blocks.
bool is_punct_cp(char32_t cp);
bool is_digit_cp(char32_t cp);

// ASCII + Latin-1 lowercasing; other code points pass through unchanged.
char32_t lower_cp(char32_t cp);

inline bool is_space_cp(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\v' ||
           cp == U'\f';
}

} // namespace corpusfit
