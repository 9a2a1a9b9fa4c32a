#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metarev::rouge {

struct TokenizeOptions {
    /// Porter-stem each token after lowercasing. Off by default: the
    /// scores are used internally as an alignment similarity, where
    /// determinism matters more than parity with any external package.
    bool porter_stemming = false;

    bool operator==(const TokenizeOptions&) const = default;
};

/// Lowercases, splits on maximal runs of non-alphanumeric characters and
/// drops empty tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenizeOptions& opts = {});

/// Classic Porter suffix-stripping on a lowercase word. Words shorter than
/// three characters or containing non-letters pass through unchanged.
std::string porter_stem(std::string word);

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct RougeSuite {
    RougeScore r1;
    RougeScore r2;
    RougeScore rl;

    double f1_sum() const { return r1.f1 + r2.f1 + rl.f1; }
};

/// Clipped n-gram overlap. Recall counts matched reference n-grams,
/// precision matched candidate n-grams; either side empty gives zeros.
RougeScore rouge_n(std::string_view candidate, std::string_view reference, int n,
                   const TokenizeOptions& opts = {});

/// Longest common subsequence over tokens of the whole texts.
RougeScore rouge_l(std::string_view candidate, std::string_view reference,
                   const TokenizeOptions& opts = {});

/// ROUGE-1, ROUGE-2 and ROUGE-L with a single tokenization pass.
RougeSuite rouge_suite(std::string_view candidate, std::string_view reference,
                       const TokenizeOptions& opts = {});

/// Token-level variants for callers that tokenize once and score many times.
RougeScore rouge_n_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference, int n);
RougeScore rouge_l_tokens(std::span<const std::string> candidate,
                          std::span<const std::string> reference);

}  // namespace metarev::rouge
