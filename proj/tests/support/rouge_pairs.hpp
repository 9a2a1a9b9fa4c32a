#pragma once

// The curated candidate/reference sentence pairs used for oracle-equivalence
// checks: repeated tokens, punctuation, casing, numerals, empty and
// single-token degenerate cases, and near-duplicates.

#include <array>
#include <string_view>
#include <utility>

namespace metarev::testsupport {

inline constexpr std::array<std::pair<std::string_view, std::string_view>, 20> kRougePairs = {{
    {"the cat sat on the mat", "the cat sat on the mat"},
    {"the cat sat", "the cat sat on the mat"},
    {"a quick brown fox", "the quick brown fox jumps"},
    {"results are strong and convincing", "the results are convincing"},
    {"we propose a novel method", "a novel method is proposed"},
    {"the the the", "the the"},
    {"empirical evaluation is weak", "theoretical analysis is weak"},
    {"", "non empty reference"},
    {"non empty candidate", ""},
    {"identical", "identical"},
    {"one two three four five", "five four three two one"},
    {"The Writing, of the PAPER!", "the writing of the paper"},
    {"experiments: 3 datasets, 12 baselines", "experiments on 3 datasets and 12 baselines"},
    {"clarity could be improved significantly", "the clarity must improve"},
    {"sound methodology with minor flaws", "methodology is sound despite minor flaws"},
    {"a b a b a b", "b a b a"},
    {"this paper is well written and easy to follow",
     "the paper is easy to follow and well written"},
    {"novel contributions to the field", "contributions are not novel"},
    {"reviewer raised concerns about reproducibility",
     "concerns about reproducibility were raised by the reviewer"},
    {"x", "x y"},
}};

}  // namespace metarev::testsupport
