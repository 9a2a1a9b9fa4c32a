#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metarev/domain.hpp"

namespace metarev::metrics {

/// Sentiment-level counts of one facet in one document, plus the
/// facet-presence flag: flattened layout [sp, p, sn, n, o].
struct FacetSlice {
    int strongly_positive = 0;
    int positive = 0;
    int strongly_negative = 0;
    int negative = 0;

    int involved() const {
        return (strongly_positive + positive + strongly_negative + negative) > 0 ? 1 : 0;
    }

    std::array<double, 5> as_array() const {
        return {static_cast<double>(strongly_positive), static_cast<double>(positive),
                static_cast<double>(strongly_negative), static_cast<double>(negative),
                static_cast<double>(involved())};
    }

    bool operator==(const FacetSlice&) const = default;
};

/// 30-dimensional sentiment-frequency representation of a document: one
/// FacetSlice per facet in canonical facet order.
struct FacetVector {
    std::array<FacetSlice, kFacetCount> slices;

    std::array<double, 5 * kFacetCount> flattened() const;

    bool operator==(const FacetVector&) const = default;
};

FacetVector facet_vector(std::span<const Judgement> judgements);

struct FacetEvalScore {
    double value = 0.0;  // in [0, 1]; 0 when either vector is all-zero
};

/// Cosine similarity of the two flattened facet vectors. Counts are
/// non-negative, so the score lies in [0, 1].
FacetEvalScore facet_eval(std::span<const Judgement> human, std::span<const Judgement> generated);

/// Cosine of the two 5-dim slices restricted to facet f; 0 when either
/// slice is all-zero.
double facet_consistency(std::span<const Judgement> doc_i, std::span<const Judgement> doc_j,
                         CriteriaFacet f);

/// True iff any two ratings differ by more than 4. Throws
/// InsufficientRatings with fewer than two ratings.
bool is_conflicting(std::span<const int> ratings);

/// Accept iff ratings above 5 strictly outnumber the rest; ties reject.
/// Throws EmptyRatings.
Decision majority_vote_decision(std::span<const int> ratings);

struct VotingSample {
    std::optional<Decision> decision;
    std::vector<int> ratings;
};

struct VotingReport {
    double disagreement_rate = 0.0;
    std::size_t counted = 0;
    std::size_t skipped = 0;  // samples without decision or ratings
};

VotingReport voting_disagreement_rate(std::span<const VotingSample> samples);

struct FacetShare {
    double judgement_share = 0.0;  // facet's judgements / all judgements
    double document_share = 0.0;   // docs with >= 1 judgement of the facet / all docs
};

/// Facet frequencies over annotated documents, indexed in canonical facet
/// order. Throws EmptyInput on an empty corpus.
std::array<FacetShare, kFacetCount> facet_frequency(
    std::span<const std::vector<Judgement>> annotated_docs);

struct FusionEvalScore {
    double accuracy = 0.0;
    std::size_t n_judgements = 0;
};

/// Exact-match accuracy between positionally paired sentiment levels.
/// Throws LengthMismatch / NoJudgements.
FusionEvalScore fusion_accuracy(std::span<const SentimentLevel> extracted,
                                std::span<const SentimentLevel> predicted);

struct ReviewJudgements {
    std::optional<int> rating;
    std::vector<Judgement> judgements;
};

struct SampleReviews {
    std::string paper_id;
    std::vector<ReviewJudgements> reviews;  // official reviews only
};

struct FacetStat {
    double mean = 0.0;
    double variance = 0.0;  // population variance
    std::size_t n = 0;      // pairs that involved the facet
};

struct ConsistencyStratum {
    std::array<FacetStat, kFacetCount> facet;
    std::size_t pair_count = 0;
};

struct ConsistencyReport {
    ConsistencyStratum with_conflicts;
    ConsistencyStratum without_conflicts;
    std::size_t skipped_pairs = 0;  // pairs lacking a rating on either side
};

/// Per-facet consistency over every unordered pair of official reviews in
/// each sample, pooled across samples and stratified by whether the pair's
/// two ratings conflict (gap > 4). A pair contributes to a facet when at
/// least one side involves it; pairs missing a rating are skipped.
ConsistencyReport pairwise_review_consistency(std::span<const SampleReviews> samples);

}  // namespace metarev::metrics
