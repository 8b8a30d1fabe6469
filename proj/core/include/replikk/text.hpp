#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace replikk {

// Number of Unicode scalar values in a UTF-8 string (continuation bytes are
// not counted). Used as the character count for per-character normalization.
std::size_t utf8_scalar_count(std::string_view text);

// Lowercases ASCII plus the Latin-1 supplement range (covers the Norwegian
// letters and other western diacritics). Bytes outside that range pass
// through unchanged.
std::string fold_case(std::string_view text);

// Splits on runs of ASCII whitespace. Never returns empty tokens.
std::vector<std::string> whitespace_tokenize(std::string_view text);

std::string_view trim(std::string_view text);

// FNV-1a, 64 bit. Stable across platforms; used for cache bucket names and
// content hashes in manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string to_hex(std::uint64_t value);

// Counts non-overlapping occurrences of needle in haystack.
std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

// Replaces every occurrence of placeholder in text.
std::string replace_all(std::string text, std::string_view placeholder,
                        std::string_view replacement);

} // namespace replikk
