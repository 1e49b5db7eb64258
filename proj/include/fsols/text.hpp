#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace fsols::text {

/// Number of Unicode code points in a UTF-8 string. Invalid bytes count as one each.
std::size_t char_count(std::string_view utf8);

/// Decodes the code point starting at `pos` and advances `pos` past it.
/// Malformed sequences yield U+FFFD and consume one byte.
char32_t decode(std::string_view utf8, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

/// Lowercases ASCII, Latin-1, Greek and Cyrillic letters; other code points pass through.
char32_t to_lower(char32_t cp);

std::string to_lower(std::string_view utf8);

/// True for horizontal or vertical Unicode whitespace (including U+00A0 and U+3000).
bool is_space(char32_t cp);

/// Word characters for tokenization: ASCII letters, digits and '_', plus every
/// non-ASCII code point that is neither whitespace nor in a punctuation/symbol block.
bool is_word_char(char32_t cp);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

std::string hex64(std::uint64_t v);

}  // namespace fsols::text
