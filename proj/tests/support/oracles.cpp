#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace metarev::testsupport::oracle {

namespace {

Prf to_prf(double matches, double cand_total, double ref_total) {
    Prf s;
    s.precision = cand_total > 0 ? matches / cand_total : 0.0;
    s.recall = ref_total > 0 ? matches / ref_total : 0.0;
    s.f1 = (s.precision + s.recall) > 0
               ? 2 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

std::vector<std::vector<std::string>> ngrams(const std::vector<std::string>& tokens, int n) {
    std::vector<std::vector<std::string>> out;
    if (tokens.size() < static_cast<std::size_t>(n)) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                         tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    }
    return out;
}

double alpha_from_coincidence(
    const std::vector<std::pair<std::optional<int>, std::optional<int>>>& units, bool ordinal) {
    // Collect pairable units and the category set.
    std::vector<std::pair<int, int>> pairs;
    for (const auto& [a, b] : units) {
        if (a && b) pairs.emplace_back(*a, *b);
    }
    std::vector<int> cats;
    for (const auto& [a, b] : pairs) {
        cats.push_back(a);
        cats.push_back(b);
    }
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());

    // Materialize the full coincidence matrix: for each pairable unit both
    // ordered value pairs get weight 1/(m_u - 1) = 1.
    std::map<int, std::map<int, double>> o;
    for (const auto& [a, b] : pairs) {
        o[a][b] += 1.0;
        o[b][a] += 1.0;
    }
    std::map<int, double> n_c;
    double n = 0;
    for (int c : cats) {
        for (int k : cats) n_c[c] += o[c][k];
        n += n_c[c];
    }

    auto delta2 = [&](int c, int k) -> double {
        if (c == k) return 0.0;
        if (!ordinal) return 1.0;
        const int lo = std::min(c, k);
        const int hi = std::max(c, k);
        double sum = 0;
        for (int g : cats) {
            if (g >= lo && g <= hi) sum += n_c[g];
        }
        sum -= (n_c[lo] + n_c[hi]) / 2.0;
        return sum * sum;
    };

    double d_o = 0;
    for (int c : cats) {
        for (int k : cats) d_o += o[c][k] * delta2(c, k);
    }
    d_o /= n;
    double d_e = 0;
    for (int c : cats) {
        for (int k : cats) {
            if (c == k) continue;
            d_e += n_c[c] * n_c[k] * delta2(c, k);
        }
    }
    d_e /= n * (n - 1.0);
    if (d_e == 0) return 1.0;
    return 1.0 - d_o / d_e;
}

}  // namespace

Prf rouge_n(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
            int n) {
    const auto cand_grams = ngrams(candidate, n);
    const auto ref_grams = ngrams(reference, n);

    // Clipped matches: for each distinct reference n-gram, count matches up
    // to its reference multiplicity.
    double matches = 0;
    std::vector<bool> cand_used(cand_grams.size(), false);
    for (const auto& rg : ref_grams) {
        for (std::size_t i = 0; i < cand_grams.size(); ++i) {
            if (!cand_used[i] && cand_grams[i] == rg) {
                cand_used[i] = true;
                matches += 1;
                break;
            }
        }
    }
    return to_prf(matches, static_cast<double>(cand_grams.size()),
                  static_cast<double>(ref_grams.size()));
}

Prf rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
    const std::size_t n = candidate.size();
    const std::size_t m = reference.size();
    std::vector<std::vector<std::size_t>> dp(n + 1, std::vector<std::size_t>(m + 1, 0));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            if (candidate[i - 1] == reference[j - 1]) {
                dp[i][j] = dp[i - 1][j - 1] + 1;
            } else {
                dp[i][j] = std::max(dp[i - 1][j], dp[i][j - 1]);
            }
        }
    }
    return to_prf(static_cast<double>(dp[n][m]), static_cast<double>(n), static_cast<double>(m));
}

double krippendorff_alpha_nominal(
    const std::vector<std::pair<std::optional<int>, std::optional<int>>>& units) {
    return alpha_from_coincidence(units, false);
}

double krippendorff_alpha_ordinal(
    const std::vector<std::pair<std::optional<int>, std::optional<int>>>& units) {
    return alpha_from_coincidence(units, true);
}

bool is_conflicting(const std::vector<int>& ratings) {
    for (std::size_t i = 0; i < ratings.size(); ++i) {
        for (std::size_t j = i + 1; j < ratings.size(); ++j) {
            if (std::abs(ratings[i] - ratings[j]) > 4) return true;
        }
    }
    return false;
}

Decision majority_vote(const std::vector<int>& ratings) {
    int above = 0;
    int rest = 0;
    for (int r : ratings) {
        if (r > 5) {
            ++above;
        } else {
            ++rest;
        }
    }
    return above > rest ? Decision::Accept : Decision::Reject;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace metarev::testsupport::oracle
