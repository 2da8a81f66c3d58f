#include <algorithm>
#include <cstdint>

#include "lexsimp/pipeline.hpp"

namespace lexsimp::pipeline {

namespace {

using text::Token;

struct Region {
    std::size_t orig_begin, orig_end;
    std::size_t simp_begin, simp_end;
};

/// Matched index pairs of a longest common subsequence under
/// case-insensitive token equality.
std::vector<std::pair<std::size_t, std::size_t>> lcs_pairs(const std::vector<std::string>& a,
                                                          const std::vector<std::string>& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<std::vector<std::uint32_t>> dp(n + 1, std::vector<std::uint32_t>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = m; j-- > 0;) {
            dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1 : std::max(dp[i + 1][j], dp[i][j + 1]);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < n && j < m) {
        if (a[i] == b[j]) {
            pairs.emplace_back(i++, j++);
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return pairs;
}

std::string quote_tokens(const std::vector<Token>& toks, std::size_t b, std::size_t e) {
    std::string out = "'";
    for (std::size_t k = b; k < e; ++k) {
        if (k > b) out += ' ';
        out += toks[k].text;
    }
    return out + "'";
}

} // namespace

Alignment align_edits(std::string_view original, std::string_view simplified) {
    const auto orig = text::tokenize(original);
    const auto simp = text::tokenize(simplified);
    std::vector<std::string> orig_keys;
    std::vector<std::string> simp_keys;
    for (const auto& t : orig) orig_keys.push_back(text::casefold(t.text));
    for (const auto& t : simp) simp_keys.push_back(text::casefold(t.text));

    std::vector<Region> regions;
    std::size_t pi = 0;
    std::size_t pj = 0;
    auto pairs = lcs_pairs(orig_keys, simp_keys);
    pairs.emplace_back(orig.size(), simp.size());
    for (const auto& [i, j] : pairs) {
        if (i > pi || j > pj) regions.push_back({pi, i, pj, j});
        pi = i + 1;
        pj = j + 1;
    }

    const auto simp_cps = text::decode(simplified);
    auto simp_text = [&](std::size_t b, std::size_t e) {
        const auto start = simp[b].span.start;
        const auto end = simp[e - 1].span.end;
        return text::encode(std::u32string_view(simp_cps).substr(start, end - start));
    };

    Alignment out;
    auto push = [&](const Token& src, std::string substitute) {
        if (!src.is_word) {
            out.diagnostics.push_back("punctuation change at '" + src.text + "' ignored");
            return;
        }
        if (text::equals_ci(src.text, substitute)) return;
        out.edits.push_back({src.text, src.span, std::move(substitute), std::nullopt});
    };

    for (const auto& r : regions) {
        const std::size_t a = r.orig_end - r.orig_begin;
        const std::size_t b = r.simp_end - r.simp_begin;
        if (a == 0) {
            out.diagnostics.push_back("insertion of " + quote_tokens(simp, r.simp_begin, r.simp_end) +
                                      " has no source token");
        } else if (b == 0) {
            out.diagnostics.push_back("deletion of " + quote_tokens(orig, r.orig_begin, r.orig_end));
        } else if (a == 1) {
            push(orig[r.orig_begin], simp_text(r.simp_begin, r.simp_end));
        } else if (a == b) {
            for (std::size_t k = 0; k < a; ++k) {
                push(orig[r.orig_begin + k], simp[r.simp_begin + k].text);
            }
        } else {
            out.diagnostics.push_back("unbalanced region " + quote_tokens(orig, r.orig_begin, r.orig_end) + " -> " +
                                      quote_tokens(simp, r.simp_begin, r.simp_end));
            push(orig[r.orig_begin], simp_text(r.simp_begin, r.simp_end));
        }
    }
    return out;
}

} // namespace lexsimp::pipeline
