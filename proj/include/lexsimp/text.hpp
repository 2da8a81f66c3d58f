#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. All offsets exposed by the toolkit count Unicode code
// points, not bytes.
namespace lexsimp::text {

/// Half-open character range [start, end).
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - start; }
    bool overlaps(const Span& other) const { return start < other.end && other.start < end; }
    friend bool operator==(const Span&, const Span&) = default;
};

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

/// Number of code points in a UTF-8 string.
std::size_t char_length(std::string_view utf8);

/// Substring by code-point offsets. Throws SpanError when out of range.
std::string substr_chars(std::string_view utf8, Span span);

/// Replace the code-point range `span` with `replacement`.
std::string replace_chars(std::string_view utf8, Span span, std::string_view replacement);

std::string trim(std::string_view s);

/// Simple case folding: ASCII, Latin-1, Latin Extended-A pairs, Greek and
/// Cyrillic basic blocks.
char32_t fold_char(char32_t cp);
std::string casefold(std::string_view s);

/// Trimmed + case-folded form used wherever candidates are compared.
std::string normalize(std::string_view s);

bool equals_ci(std::string_view a, std::string_view b);

bool is_upper(char32_t cp);
char32_t to_upper(char32_t cp);

/// Uppercase the first code point of `replacement` when the first code
/// point of `original` is uppercase.
std::string match_leading_case(std::string_view original, std::string_view replacement);

struct Token {
    std::string text;
    Span span;
    bool is_word = false;
};

/// Words are maximal runs of letters/digits, with an apostrophe or hyphen
/// allowed between two word characters. Every other non-space character is
/// a token of its own.
std::vector<Token> tokenize(std::string_view utf8);

/// Spans of whole-word tokens equal (case-insensitively) to `word`.
std::vector<Span> find_word(std::string_view sentence, std::string_view word);

/// True when `s` tokenizes to exactly one word token.
bool is_single_word(std::string_view s);

} // namespace lexsimp::text
