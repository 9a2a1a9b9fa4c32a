#include "metarev/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "metarev/errors.hpp"

namespace metarev::metrics {

namespace {

template <std::size_t N>
double cosine(const std::array<double, N>& a, const std::array<double, N>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < N; ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    // All-zero vectors carry no shared signal: defined as 0.
    if (na == 0 || nb == 0) return 0.0;
    // Identical vectors score exactly 1, free of rounding in the norms.
    if (a == b) return 1.0;
    const double value = dot / (std::sqrt(na) * std::sqrt(nb));
    return value > 1.0 ? 1.0 : value;
}

void count_into(FacetSlice& slice, SentimentLevel level) {
    switch (level) {
        case SentimentLevel::StronglyPositive: ++slice.strongly_positive; break;
        case SentimentLevel::Positive: ++slice.positive; break;
        case SentimentLevel::StronglyNegative: ++slice.strongly_negative; break;
        case SentimentLevel::Negative: ++slice.negative; break;
    }
}

FacetSlice facet_slice(std::span<const Judgement> judgements, CriteriaFacet f) {
    FacetSlice slice;
    for (const auto& j : judgements) {
        if (j.facet == f) count_into(slice, j.level);
    }
    return slice;
}

struct Welford {
    // Plain two-pass is overkill here; accumulate sums for population stats.
    double sum = 0;
    double sum_sq = 0;
    std::size_t n = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }

    FacetStat stat() const {
        FacetStat s;
        s.n = n;
        if (n == 0) return s;
        s.mean = sum / static_cast<double>(n);
        s.variance = sum_sq / static_cast<double>(n) - s.mean * s.mean;
        if (s.variance < 0) s.variance = 0;  // guard rounding
        return s;
    }
};

}  // namespace

std::array<double, 5 * kFacetCount> FacetVector::flattened() const {
    std::array<double, 5 * kFacetCount> out{};
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        const auto arr = slices[f].as_array();
        std::copy(arr.begin(), arr.end(), out.begin() + static_cast<std::ptrdiff_t>(5 * f));
    }
    return out;
}

FacetVector facet_vector(std::span<const Judgement> judgements) {
    FacetVector v;
    for (const auto& j : judgements) {
        count_into(v.slices[facet_index(j.facet)], j.level);
    }
    return v;
}

namespace {

// Scored vectors carry relative frequencies, not raw counts: the
// involvement flags do not scale with judgement multiplicity, so only the
// normalized form makes the score invariant under duplicating a document's
// judgements.
std::array<double, 5 * kFacetCount> document_distribution(std::span<const Judgement> judgements) {
    auto flat = facet_vector(judgements).flattened();
    double total = 0;
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        for (std::size_t i = 0; i < 4; ++i) total += flat[f * 5 + i];
    }
    if (total > 0) {
        for (std::size_t f = 0; f < kFacetCount; ++f) {
            for (std::size_t i = 0; i < 4; ++i) flat[f * 5 + i] /= total;
        }
    }
    return flat;
}

std::array<double, 5> slice_distribution(const FacetSlice& slice) {
    auto arr = slice.as_array();
    const double total = arr[0] + arr[1] + arr[2] + arr[3];
    if (total > 0) {
        for (std::size_t i = 0; i < 4; ++i) arr[i] /= total;
    }
    return arr;
}

}  // namespace

FacetEvalScore facet_eval(std::span<const Judgement> human, std::span<const Judgement> generated) {
    const auto mh = document_distribution(human);
    const auto mg = document_distribution(generated);
    return {cosine(mh, mg)};
}

double facet_consistency(std::span<const Judgement> doc_i, std::span<const Judgement> doc_j,
                         CriteriaFacet f) {
    const auto di = slice_distribution(facet_slice(doc_i, f));
    const auto dj = slice_distribution(facet_slice(doc_j, f));
    return cosine(di, dj);
}

bool is_conflicting(std::span<const int> ratings) {
    if (ratings.size() < 2) {
        throw InsufficientRatings("conflict detection needs at least two ratings");
    }
    const auto [lo, hi] = std::minmax_element(ratings.begin(), ratings.end());
    return *hi - *lo > 4;
}

Decision majority_vote_decision(std::span<const int> ratings) {
    if (ratings.empty()) {
        throw EmptyRatings("majority vote needs at least one rating");
    }
    std::size_t above = 0;
    for (int r : ratings) {
        if (r > 5) ++above;
    }
    const std::size_t not_above = ratings.size() - above;
    return above > not_above ? Decision::Accept : Decision::Reject;
}

VotingReport voting_disagreement_rate(std::span<const VotingSample> samples) {
    VotingReport report;
    std::size_t mismatches = 0;
    for (const auto& s : samples) {
        if (!s.decision || s.ratings.empty()) {
            ++report.skipped;
            continue;
        }
        ++report.counted;
        if (majority_vote_decision(s.ratings) != *s.decision) ++mismatches;
    }
    if (report.counted > 0) {
        report.disagreement_rate =
            static_cast<double>(mismatches) / static_cast<double>(report.counted);
    }
    return report;
}

std::array<FacetShare, kFacetCount> facet_frequency(
    std::span<const std::vector<Judgement>> annotated_docs) {
    if (annotated_docs.empty()) {
        throw EmptyInput("facet_frequency requires at least one document");
    }
    std::array<FacetShare, kFacetCount> out{};
    std::array<double, kFacetCount> judgement_counts{};
    std::array<double, kFacetCount> doc_counts{};
    double total_judgements = 0;
    for (const auto& doc : annotated_docs) {
        std::array<bool, kFacetCount> seen{};
        for (const auto& j : doc) {
            judgement_counts[facet_index(j.facet)] += 1;
            seen[facet_index(j.facet)] = true;
            total_judgements += 1;
        }
        for (std::size_t f = 0; f < kFacetCount; ++f) {
            if (seen[f]) doc_counts[f] += 1;
        }
    }
    const double total_docs = static_cast<double>(annotated_docs.size());
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        out[f].judgement_share = total_judgements > 0 ? judgement_counts[f] / total_judgements : 0;
        out[f].document_share = doc_counts[f] / total_docs;
    }
    return out;
}

FusionEvalScore fusion_accuracy(std::span<const SentimentLevel> extracted,
                                std::span<const SentimentLevel> predicted) {
    if (extracted.size() != predicted.size()) {
        throw LengthMismatch("extracted and predicted level lists differ in length");
    }
    if (extracted.empty()) {
        throw NoJudgements("no judgements to score");
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < extracted.size(); ++i) {
        if (extracted[i] == predicted[i]) ++matches;
    }
    FusionEvalScore score;
    score.n_judgements = extracted.size();
    score.accuracy = static_cast<double>(matches) / static_cast<double>(extracted.size());
    return score;
}

ConsistencyReport pairwise_review_consistency(std::span<const SampleReviews> samples) {
    std::array<Welford, kFacetCount> with_acc;
    std::array<Welford, kFacetCount> without_acc;
    ConsistencyReport report;

    for (const auto& sample : samples) {
        const auto& reviews = sample.reviews;
        for (std::size_t i = 0; i < reviews.size(); ++i) {
            for (std::size_t j = i + 1; j < reviews.size(); ++j) {
                if (!reviews[i].rating || !reviews[j].rating) {
                    ++report.skipped_pairs;
                    continue;
                }
                const std::array<int, 2> pair_ratings = {*reviews[i].rating, *reviews[j].rating};
                const bool conflict = is_conflicting(pair_ratings);
                auto& acc = conflict ? with_acc : without_acc;
                auto& stratum = conflict ? report.with_conflicts : report.without_conflicts;
                ++stratum.pair_count;
                const auto vi = facet_vector(reviews[i].judgements);
                const auto vj = facet_vector(reviews[j].judgements);
                for (std::size_t f = 0; f < kFacetCount; ++f) {
                    if (vi.slices[f].involved() == 0 && vj.slices[f].involved() == 0) continue;
                    acc[f].add(
                        cosine(slice_distribution(vi.slices[f]), slice_distribution(vj.slices[f])));
                }
            }
        }
    }
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        report.with_conflicts.facet[f] = with_acc[f].stat();
        report.without_conflicts.facet[f] = without_acc[f].stat();
    }
    return report;
}

}  // namespace metarev::metrics
