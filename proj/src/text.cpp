#include "lexsimp/text.hpp"

#include "lexsimp/errors.hpp"

namespace lexsimp::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_space(char32_t cp) {
    switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
        return true;
    default:
        return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (is_space(cp)) return false;
    if (cp <= 0xBF) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    if (cp == 0xD7 || cp == 0xF7) return false;
    if (cp >= 0x2000 && cp <= 0x2BFF) return false;  // punctuation, currency, symbols, arrows
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return false;
    if ((cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
        (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65)) {
        return false;
    }
    if (cp >= 0x1F000 && cp <= 0x1FAFF) return false;
    return true;
}

bool is_joiner(char32_t cp) {
    return cp == '\'' || cp == 0x2019 || cp == '-' || cp == 0x2010 || cp == 0x2011;
}

} // namespace

std::u32string decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    while (i < utf8.size()) {
        const auto lead = static_cast<unsigned char>(utf8[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (lead < 0x80) { len = 1; cp = lead; }
        else if ((lead & 0xE0) == 0xC0) { len = 2; cp = lead & 0x1F; }
        else if ((lead & 0xF0) == 0xE0) { len = 3; cp = lead & 0x0F; }
        else if ((lead & 0xF8) == 0xF0) { len = 4; cp = lead & 0x07; }
        else { out.push_back(kReplacement); ++i; continue; }

        if (i + len > utf8.size()) { out.push_back(kReplacement); ++i; continue; }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            const auto c = static_cast<unsigned char>(utf8[i + k]);
            if ((c & 0xC0) != 0x80) { ok = false; break; }
            cp = (cp << 6) | (c & 0x3F);
        }
        if (!ok) { out.push_back(kReplacement); ++i; continue; }
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::size_t char_length(std::string_view utf8) { return decode(utf8).size(); }

std::string substr_chars(std::string_view utf8, Span span) {
    const auto cps = decode(utf8);
    if (span.start > span.end || span.end > cps.size()) {
        throw SpanError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        ") out of range for text of length " + std::to_string(cps.size()));
    }
    return encode(std::u32string_view(cps).substr(span.start, span.length()));
}

std::string replace_chars(std::string_view utf8, Span span, std::string_view replacement) {
    const auto cps = decode(utf8);
    if (span.start > span.end || span.end > cps.size()) {
        throw SpanError("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        ") out of range for text of length " + std::to_string(cps.size()));
    }
    const std::u32string_view view(cps);
    std::string out = encode(view.substr(0, span.start));
    out += replacement;
    out += encode(view.substr(span.end));
    return out;
}

std::string trim(std::string_view s) {
    const auto cps = decode(s);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    return encode(std::u32string_view(cps).substr(b, e - b));
}

char32_t fold_char(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp < 0xC0) return cp;
    if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 32;
    if (cp >= 0x100 && cp <= 0x137) return cp | 1;
    if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x14A && cp <= 0x177) return cp | 1;
    if (cp == 0x178) return 0xFF;
    if (cp >= 0x179 && cp <= 0x17E) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
    if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
    if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
    return cp;
}

bool is_upper(char32_t cp) { return fold_char(cp) != cp; }

char32_t to_upper(char32_t cp) {
    if (cp >= 'a' && cp <= 'z') return cp - 32;
    if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
    if (cp == 0xFF) return 0x178;
    if ((cp >= 0x101 && cp <= 0x137) || (cp >= 0x14B && cp <= 0x177)) return (cp % 2 == 1) ? cp - 1 : cp;
    if ((cp >= 0x13A && cp <= 0x148) || (cp >= 0x17A && cp <= 0x17E)) return (cp % 2 == 0) ? cp - 1 : cp;
    if (cp >= 0x3B1 && cp <= 0x3C9 && cp != 0x3C2) return cp - 32;
    if (cp >= 0x430 && cp <= 0x44F) return cp - 32;
    if (cp >= 0x450 && cp <= 0x45F) return cp - 80;
    return cp;
}

std::string casefold(std::string_view s) {
    auto cps = decode(s);
    for (auto& cp : cps) cp = fold_char(cp);
    return encode(cps);
}

std::string normalize(std::string_view s) { return casefold(trim(s)); }

bool equals_ci(std::string_view a, std::string_view b) { return casefold(a) == casefold(b); }

std::string match_leading_case(std::string_view original, std::string_view replacement) {
    const auto orig = decode(original);
    auto repl = decode(replacement);
    if (!orig.empty() && !repl.empty() && is_upper(orig.front()) && !is_upper(repl.front())) {
        repl.front() = to_upper(repl.front());
    }
    return encode(repl);
}

std::vector<Token> tokenize(std::string_view utf8) {
    const auto cps = decode(utf8);
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (is_space(cps[i])) { ++i; continue; }
        if (!is_word_char(cps[i])) {
            tokens.push_back({encode(std::u32string_view(cps).substr(i, 1)), {i, i + 1}, false});
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < cps.size()) {
            if (is_word_char(cps[j])) { ++j; continue; }
            if (is_joiner(cps[j]) && j + 1 < cps.size() && is_word_char(cps[j + 1])) { j += 2; continue; }
            break;
        }
        tokens.push_back({encode(std::u32string_view(cps).substr(i, j - i)), {i, j}, true});
        i = j;
    }
    return tokens;
}

std::vector<Span> find_word(std::string_view sentence, std::string_view word) {
    const auto key = normalize(word);
    std::vector<Span> spans;
    if (key.empty()) return spans;
    for (const auto& tok : tokenize(sentence)) {
        if (tok.is_word && casefold(tok.text) == key) spans.push_back(tok.span);
    }
    return spans;
}

bool is_single_word(std::string_view s) {
    const auto toks = tokenize(s);
    return toks.size() == 1 && toks.front().is_word;
}

} // namespace lexsimp::text
