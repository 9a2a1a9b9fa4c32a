#include "metarev/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "metarev/errors.hpp"

namespace metarev::agreement {

namespace {

constexpr double kEps = 1e-12;

std::vector<std::uint8_t> mark_spans(std::size_t doc_len, std::span<const TextSpan> spans) {
    std::vector<std::uint8_t> v(doc_len, 0);
    for (const auto& s : spans) {
        if (s.start >= s.end || s.end > doc_len) {
            throw SpanError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                            ") out of range for document of length " + std::to_string(doc_len));
        }
        std::fill(v.begin() + static_cast<std::ptrdiff_t>(s.start),
                  v.begin() + static_cast<std::ptrdiff_t>(s.end), std::uint8_t{1});
    }
    return v;
}

int component_code(const Judgement& j, JudgementComponent c) {
    switch (c) {
        case JudgementComponent::Facet:
            return static_cast<int>(j.facet);
        case JudgementComponent::Level:
            return level_rank(j.level);
        case JudgementComponent::Convincingness:
            return static_cast<int>(j.convincingness);
        case JudgementComponent::Expresser:
            return static_cast<int>(j.expresser);
    }
    return 0;
}

}  // namespace

std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> span_char_vectors(
    std::size_t doc_len, std::span<const TextSpan> spans_a, std::span<const TextSpan> spans_b) {
    return {mark_spans(doc_len, spans_a), mark_spans(doc_len, spans_b)};
}

double cohens_kappa(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw LengthMismatch("label sequences differ in length");
    }
    if (labels_a.empty()) {
        throw EmptyInput("cohens_kappa requires non-empty sequences");
    }
    const double n = static_cast<double>(labels_a.size());
    std::map<int, double> counts_a;
    std::map<int, double> counts_b;
    double matches = 0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        counts_a[labels_a[i]] += 1;
        counts_b[labels_b[i]] += 1;
        if (labels_a[i] == labels_b[i]) matches += 1;
    }
    const double p_o = matches / n;
    double p_e = 0;
    for (const auto& [label, ca] : counts_a) {
        auto it = counts_b.find(label);
        if (it != counts_b.end()) p_e += (ca / n) * (it->second / n);
    }
    if (1.0 - p_e < kEps) {
        if (1.0 - p_o < kEps) return 1.0;
        throw DegenerateAgreement("chance agreement is 1 but observed agreement is not");
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double krippendorff_alpha(std::span<const LabelPair> units, AlphaMetric metric) {
    // Pairable units only: with two annotators a unit contributes iff both
    // values are present.
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(units.size());
    for (const auto& u : units) {
        if (u.a && u.b) pairs.emplace_back(*u.a, *u.b);
    }
    if (pairs.size() < 2) {
        throw InsufficientData("krippendorff_alpha requires at least two pairable units");
    }

    std::map<int, double> value_counts;  // n_c over both rater positions
    for (const auto& [a, b] : pairs) {
        value_counts[a] += 1;
        value_counts[b] += 1;
    }
    const double n = 2.0 * static_cast<double>(pairs.size());

    // Squared distance between category codes under the chosen metric.
    auto dist2 = [&](int c, int k) -> double {
        if (c == k) return 0.0;
        if (metric == AlphaMetric::Nominal) return 1.0;
        // Ordinal: cumulative frequency between the two ranks, end ranks
        // at half weight.
        const int lo = std::min(c, k);
        const int hi = std::max(c, k);
        double sum = 0;
        for (const auto& [v, cnt] : value_counts) {
            if (v >= lo && v <= hi) sum += cnt;
        }
        sum -= (value_counts.at(lo) + value_counts.at(hi)) / 2.0;
        return sum * sum;
    };

    // Observed disagreement: each pairable unit of size 2 puts weight 1 on
    // (a,b) and (b,a) in the coincidence matrix.
    double d_o = 0;
    for (const auto& [a, b] : pairs) {
        d_o += 2.0 * dist2(a, b);
    }
    d_o /= n;

    double d_e = 0;
    for (const auto& [c, nc] : value_counts) {
        for (const auto& [k, nk] : value_counts) {
            if (c == k) continue;
            d_e += nc * nk * dist2(c, k);
        }
    }
    d_e /= n * (n - 1.0);

    if (d_e < kEps) {
        // Every pairable value identical: perfect agreement by convention.
        return 1.0;
    }
    return 1.0 - d_o / d_e;
}

std::vector<AlignedPair> align_judgements(std::span<const Judgement> set_a,
                                          std::span<const Judgement> set_b, double threshold,
                                          const rouge::TokenizeOptions& tokenize) {
    struct Candidate {
        double similarity;
        std::size_t ia;
        std::size_t ib;
    };
    std::vector<Candidate> candidates;
    std::vector<std::vector<std::string>> tokens_a(set_a.size());
    std::vector<std::vector<std::string>> tokens_b(set_b.size());
    auto expression_tokens = [&](const Judgement& j) {
        return rouge::tokenize(j.content_expression + " " + j.sentiment_expression, tokenize);
    };
    for (std::size_t i = 0; i < set_a.size(); ++i) tokens_a[i] = expression_tokens(set_a[i]);
    for (std::size_t i = 0; i < set_b.size(); ++i) tokens_b[i] = expression_tokens(set_b[i]);

    for (std::size_t ia = 0; ia < set_a.size(); ++ia) {
        for (std::size_t ib = 0; ib < set_b.size(); ++ib) {
            const double sim = rouge::rouge_n_tokens(tokens_a[ia], tokens_b[ib], 1).f1 +
                               rouge::rouge_n_tokens(tokens_a[ia], tokens_b[ib], 2).f1 +
                               rouge::rouge_l_tokens(tokens_a[ia], tokens_b[ib]).f1;
            if (sim > threshold) candidates.push_back({sim, ia, ib});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
        if (x.similarity != y.similarity) return x.similarity > y.similarity;
        if (x.ia != y.ia) return x.ia < y.ia;
        return x.ib < y.ib;
    });

    std::vector<bool> used_a(set_a.size(), false);
    std::vector<bool> used_b(set_b.size(), false);
    std::vector<AlignedPair> out;
    for (const auto& c : candidates) {
        if (used_a[c.ia] || used_b[c.ib]) continue;
        used_a[c.ia] = true;
        used_b[c.ib] = true;
        out.push_back({set_a[c.ia], set_b[c.ib], c.similarity});
    }
    return out;
}

AgreementStats component_agreement(std::span<const AlignedPair> pairs, JudgementComponent c,
                                   AlphaMetric metric) {
    if (pairs.size() < 2) {
        throw InsufficientData("component_agreement requires at least two aligned pairs");
    }
    std::vector<int> a;
    std::vector<int> b;
    std::vector<LabelPair> units;
    a.reserve(pairs.size());
    b.reserve(pairs.size());
    units.reserve(pairs.size());
    for (const auto& p : pairs) {
        a.push_back(component_code(p.a, c));
        b.push_back(component_code(p.b, c));
        units.push_back({a.back(), b.back()});
    }
    AgreementStats stats;
    stats.kappa = cohens_kappa(a, b);
    stats.alpha = krippendorff_alpha(units, metric);
    stats.n_units = pairs.size();
    return stats;
}

}  // namespace metarev::agreement
