#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metarev/errors.hpp"

namespace metarev {

/// The six review-criteria facets every judgement is filed under. The
/// declaration order is canonical: it fixes the layout of facet vectors
/// and the order of every per-facet report.
enum class CriteriaFacet {
    Novelty,
    Soundness,
    Clarity,
    Advancement,
    Compliance,
    Overall,
};

inline constexpr std::size_t kFacetCount = 6;

inline constexpr std::array<CriteriaFacet, kFacetCount> kAllFacets = {
    CriteriaFacet::Novelty,     CriteriaFacet::Soundness,  CriteriaFacet::Clarity,
    CriteriaFacet::Advancement, CriteriaFacet::Compliance, CriteriaFacet::Overall,
};

constexpr std::size_t facet_index(CriteriaFacet f) {
    return static_cast<std::size_t>(f);
}

/// Polarity with strength.
enum class SentimentLevel {
    StronglyPositive,
    Positive,
    Negative,
    StronglyNegative,
};

inline constexpr std::array<SentimentLevel, 4> kAllLevels = {
    SentimentLevel::StronglyPositive,
    SentimentLevel::Positive,
    SentimentLevel::Negative,
    SentimentLevel::StronglyNegative,
};

enum class Polarity { Positive, Negative };

constexpr Polarity polarity(SentimentLevel level) {
    switch (level) {
        case SentimentLevel::StronglyPositive:
        case SentimentLevel::Positive:
            return Polarity::Positive;
        case SentimentLevel::Negative:
        case SentimentLevel::StronglyNegative:
            return Polarity::Negative;
    }
    return Polarity::Negative;
}

/// Position of a level on the negative-to-positive scale, for ordinal
/// agreement statistics: StronglyNegative = 0 .. StronglyPositive = 3.
constexpr int level_rank(SentimentLevel level) {
    switch (level) {
        case SentimentLevel::StronglyNegative: return 0;
        case SentimentLevel::Negative: return 1;
        case SentimentLevel::Positive: return 2;
        case SentimentLevel::StronglyPositive: return 3;
    }
    return 0;
}

enum class ConvincingnessLevel {
    NotApplicable,
    NotAtAll,
    SlightlyConvincing,
    HighlyConvincing,
};

inline constexpr std::array<ConvincingnessLevel, 4> kAllConvincingness = {
    ConvincingnessLevel::NotApplicable,
    ConvincingnessLevel::NotAtAll,
    ConvincingnessLevel::SlightlyConvincing,
    ConvincingnessLevel::HighlyConvincing,
};

enum class Expresser { Self, Others };

enum class DocType { OfficialReview, Discussion, MetaReview };

enum class Decision { Accept, Reject };

std::string_view facet_name(CriteriaFacet f);
std::string_view level_name(SentimentLevel level);
std::string_view convincingness_name(ConvincingnessLevel c);
std::string_view expresser_name(Expresser e);
std::string_view doc_type_name(DocType t);
std::string_view decision_name(Decision d);

/// Label parsers are case-insensitive, trim surrounding whitespace and
/// treat '_', '-' and space runs as equivalent. They return nullopt on
/// labels outside the closed set; the caller decides whether that drops
/// the record or fails the run.
std::optional<CriteriaFacet> parse_facet(std::string_view label);
std::optional<SentimentLevel> parse_sentiment_level(std::string_view label);
std::optional<ConvincingnessLevel> parse_convincingness(std::string_view label);
std::optional<Expresser> parse_expresser(std::string_view label);
std::optional<DocType> parse_doc_type(std::string_view label);
std::optional<Decision> parse_decision(std::string_view label);

enum class SpanKind { Content, Sentiment };

std::string_view span_kind_name(SpanKind k);
std::optional<SpanKind> parse_span_kind(std::string_view label);

/// Highlighted region of a document, addressed in Unicode scalar values
/// (not bytes) so offsets survive re-encoding.
struct TextSpan {
    SpanKind kind = SpanKind::Content;
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive

    bool operator==(const TextSpan&) const = default;
};

/// One extracted opinion unit: what is being judged, how, and where the
/// judgement came from.
struct Judgement {
    std::string judgement_sentence;
    std::string content_expression;
    std::string sentiment_expression;
    CriteriaFacet facet = CriteriaFacet::Overall;
    SentimentLevel level = SentimentLevel::Positive;
    ConvincingnessLevel convincingness = ConvincingnessLevel::NotAtAll;
    Expresser expresser = Expresser::Self;
    std::string doc_id;
    /// True when both expressions occur verbatim in the judgement sentence
    /// (always the case for machine-extracted judgements; annotator-supplied
    /// ones may paraphrase and carry false here).
    bool verbatim = false;

    bool operator==(const Judgement&) const = default;
};

struct SourceDocument {
    std::string doc_id;
    DocType doc_type = DocType::OfficialReview;
    std::string text;
    std::optional<int> rating;  // 1..10, official reviews only
    std::optional<std::string> author_role;

    bool operator==(const SourceDocument&) const = default;
};

/// One paper's review bundle: the inputs (reviews + discussions) and the
/// human-written meta-review they were consolidated into.
struct Sample {
    std::string paper_id;
    int year = 0;
    std::vector<SourceDocument> source_documents;  // never MetaReview
    SourceDocument meta_review;                    // doc_type == MetaReview
    std::optional<Decision> decision;

    bool operator==(const Sample&) const = default;

    std::vector<const SourceDocument*> official_reviews() const;
    std::vector<const SourceDocument*> discussions() const;
    /// Ratings of the official reviews that carry one, in document order.
    std::vector<int> ratings() const;
};

/// Collects every invariant violation in `j` without throwing; `path`
/// prefixes the reported field paths.
std::vector<Violation> check_judgement(const Judgement& j, const std::string& path);

/// Collects every invariant violation in `s` without throwing.
std::vector<Violation> check_sample(const Sample& s);

/// Enforces all type invariants; throws ValidationError carrying every
/// violation found. Idempotent: validating a valid sample is the identity.
Sample validate_sample(Sample raw);

}  // namespace metarev
