#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "metarev/domain.hpp"
#include "metarev/rouge.hpp"

namespace metarev::agreement {

/// Per-character highlight indicators for two annotators over one document:
/// position i is 1 iff it lies inside any of that annotator's spans.
/// Lengths are doc_len (Unicode scalar values). Overlapping spans merge.
/// Throws SpanError if any span exceeds [0, doc_len].
std::pair<std::vector<std::uint8_t>, std::vector<std::uint8_t>> span_char_vectors(
    std::size_t doc_len, std::span<const TextSpan> spans_a, std::span<const TextSpan> spans_b);

/// Cohen's kappa over two equal-length categorical sequences; labels are
/// arbitrary integer codes. Expected agreement comes from the two
/// annotators' own marginals. Throws EmptyInput on empty sequences and
/// DegenerateAgreement when chance agreement is 1 with observed < 1.
double cohens_kappa(std::span<const int> labels_a, std::span<const int> labels_b);

enum class AlphaMetric {
    Nominal,
    /// Ordinal distance over the integer codes taken as ranks.
    Ordinal,
};

/// One unit rated by two annotators; missing values allowed.
struct LabelPair {
    std::optional<int> a;
    std::optional<int> b;
};

/// Krippendorff's alpha via the coincidence-matrix formulation. Units with
/// fewer than two values are unpairable and ignored. Throws
/// InsufficientData with fewer than two pairable units.
double krippendorff_alpha(std::span<const LabelPair> units,
                          AlphaMetric metric = AlphaMetric::Nominal);

/// Two judgements recognized as the same opinion by both annotators.
struct AlignedPair {
    Judgement a;
    Judgement b;
    double similarity = 0.0;  // rouge-1 + rouge-2 + rouge-l f1 over the expressions
};

/// Matches judgements across two annotators of one document. Similarity is
/// the three-score ROUGE f1 sum over the concatenated content and sentiment
/// expressions; pairs at or below `threshold` never match. Matching is
/// greedy one-to-one in descending similarity, ties broken by lowest index
/// pair, so the result is deterministic for a given input order.
std::vector<AlignedPair> align_judgements(std::span<const Judgement> set_a,
                                          std::span<const Judgement> set_b,
                                          double threshold = 2.0,
                                          const rouge::TokenizeOptions& tokenize = {});

enum class JudgementComponent { Facet, Level, Convincingness, Expresser };

struct AgreementStats {
    double kappa = 0.0;
    double alpha = 0.0;
    std::size_t n_units = 0;
};

/// Agreement on one judgement component across aligned pairs. Requires at
/// least two pairs (InsufficientData otherwise). The ordinal metric only
/// affects alpha and only orders sensibly for Level.
AgreementStats component_agreement(std::span<const AlignedPair> pairs, JudgementComponent c,
                                   AlphaMetric metric = AlphaMetric::Nominal);

}  // namespace metarev::agreement
