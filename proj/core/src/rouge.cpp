#include "metarev/rouge.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace metarev::rouge {

namespace {

RougeScore make_score(double matches, double candidate_total, double reference_total) {
    RougeScore s;
    s.precision = candidate_total > 0 ? matches / candidate_total : 0.0;
    s.recall = reference_total > 0 ? matches / reference_total : 0.0;
    const double pr = s.precision + s.recall;
    s.f1 = pr > 0 ? 2.0 * s.precision * s.recall / pr : 0.0;
    return s;
}

/// Joins n consecutive tokens with '\x1f' as a hashable n-gram key.
std::unordered_map<std::string, int> ngram_counts(std::span<const std::string> tokens, int n) {
    std::unordered_map<std::string, int> counts;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += tokens[i + j];
        }
        ++counts[key];
    }
    return counts;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.empty() || b.empty()) return 0;
    // Two-row DP, O(|a|*|b|) time, O(|b|) space.
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    if (opts.porter_stemming) {
        for (auto& t : tokens) t = porter_stem(std::move(t));
    }
    return tokens;
}

RougeScore rouge_n_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference, int n) {
    const auto cand = ngram_counts(candidate, n);
    const auto ref = ngram_counts(reference, n);
    double matches = 0;
    double cand_total = 0;
    double ref_total = 0;
    for (const auto& [k, v] : cand) cand_total += v;
    for (const auto& [k, v] : ref) ref_total += v;
    for (const auto& [k, v] : cand) {
        auto it = ref.find(k);
        if (it != ref.end()) matches += std::min(v, it->second);
    }
    return make_score(matches, cand_total, ref_total);
}

RougeScore rouge_l_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference) {
    const double lcs = static_cast<double>(lcs_length(candidate, reference));
    return make_score(lcs, static_cast<double>(candidate.size()),
                      static_cast<double>(reference.size()));
}

RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n,
                   const TokenizeOptions& opts) {
    return rouge_n_tokens(tokenize(candidate, opts), tokenize(reference, opts), n);
}

RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   const TokenizeOptions& opts) {
    return rouge_l_tokens(tokenize(candidate, opts), tokenize(reference, opts));
}

RougeSuite rouge_suite(std::string_view candidate, std::string_view reference,
                       const TokenizeOptions& opts) {
    const auto cand = tokenize(candidate, opts);
    const auto ref = tokenize(reference, opts);
    RougeSuite suite;
    suite.r1 = rouge_n_tokens(cand, ref, 1);
    suite.r2 = rouge_n_tokens(cand, ref, 2);
    suite.rl = rouge_l_tokens(cand, ref);
    return suite;
}

}  // namespace metarev::rouge
