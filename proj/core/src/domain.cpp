#include "metarev/domain.hpp"

#include <unordered_set>

#include "metarev/text.hpp"

namespace metarev {

std::string_view facet_name(CriteriaFacet f) {
    switch (f) {
        case CriteriaFacet::Novelty: return "Novelty";
        case CriteriaFacet::Soundness: return "Soundness";
        case CriteriaFacet::Clarity: return "Clarity";
        case CriteriaFacet::Advancement: return "Advancement";
        case CriteriaFacet::Compliance: return "Compliance";
        case CriteriaFacet::Overall: return "Overall";
    }
    return "Overall";
}

std::string_view level_name(SentimentLevel level) {
    switch (level) {
        case SentimentLevel::StronglyPositive: return "Strong positive";
        case SentimentLevel::Positive: return "Positive";
        case SentimentLevel::Negative: return "Negative";
        case SentimentLevel::StronglyNegative: return "Strong negative";
    }
    return "Positive";
}

std::string_view convincingness_name(ConvincingnessLevel c) {
    switch (c) {
        case ConvincingnessLevel::NotApplicable: return "Not applicable";
        case ConvincingnessLevel::NotAtAll: return "Not at all";
        case ConvincingnessLevel::SlightlyConvincing: return "Slightly Convincing";
        case ConvincingnessLevel::HighlyConvincing: return "Highly Convincing";
    }
    return "Not at all";
}

std::string_view expresser_name(Expresser e) {
    return e == Expresser::Self ? "Self" : "Others";
}

std::string_view doc_type_name(DocType t) {
    switch (t) {
        case DocType::OfficialReview: return "official_review";
        case DocType::Discussion: return "discussion";
        case DocType::MetaReview: return "meta_review";
    }
    return "discussion";
}

std::string_view decision_name(Decision d) {
    return d == Decision::Accept ? "accept" : "reject";
}

std::optional<CriteriaFacet> parse_facet(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "novelty") return CriteriaFacet::Novelty;
    if (norm == "soundness") return CriteriaFacet::Soundness;
    if (norm == "clarity") return CriteriaFacet::Clarity;
    if (norm == "advancement") return CriteriaFacet::Advancement;
    if (norm == "compliance") return CriteriaFacet::Compliance;
    if (norm == "overall" || norm == "overall quality") return CriteriaFacet::Overall;
    return std::nullopt;
}

std::optional<SentimentLevel> parse_sentiment_level(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "strong positive" || norm == "strongly positive") {
        return SentimentLevel::StronglyPositive;
    }
    if (norm == "positive") return SentimentLevel::Positive;
    if (norm == "negative") return SentimentLevel::Negative;
    if (norm == "strong negative" || norm == "strongly negative") {
        return SentimentLevel::StronglyNegative;
    }
    return std::nullopt;
}

std::optional<ConvincingnessLevel> parse_convincingness(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "not applicable") return ConvincingnessLevel::NotApplicable;
    if (norm == "not at all") return ConvincingnessLevel::NotAtAll;
    if (norm == "slightly convincing") return ConvincingnessLevel::SlightlyConvincing;
    if (norm == "highly convincing") return ConvincingnessLevel::HighlyConvincing;
    return std::nullopt;
}

std::optional<Expresser> parse_expresser(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "self") return Expresser::Self;
    if (norm == "others") return Expresser::Others;
    return std::nullopt;
}

std::optional<DocType> parse_doc_type(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "official review") return DocType::OfficialReview;
    if (norm == "discussion") return DocType::Discussion;
    if (norm == "meta review") return DocType::MetaReview;
    return std::nullopt;
}

std::string_view span_kind_name(SpanKind k) {
    return k == SpanKind::Content ? "content" : "sentiment";
}

std::optional<SpanKind> parse_span_kind(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "content") return SpanKind::Content;
    if (norm == "sentiment") return SpanKind::Sentiment;
    return std::nullopt;
}

std::optional<Decision> parse_decision(std::string_view label) {
    const std::string norm = text::normalize_label(label);
    if (norm == "accept") return Decision::Accept;
    if (norm == "reject") return Decision::Reject;
    return std::nullopt;
}

std::vector<const SourceDocument*> Sample::official_reviews() const {
    std::vector<const SourceDocument*> out;
    for (const auto& d : source_documents) {
        if (d.doc_type == DocType::OfficialReview) out.push_back(&d);
    }
    return out;
}

std::vector<const SourceDocument*> Sample::discussions() const {
    std::vector<const SourceDocument*> out;
    for (const auto& d : source_documents) {
        if (d.doc_type == DocType::Discussion) out.push_back(&d);
    }
    return out;
}

std::vector<int> Sample::ratings() const {
    std::vector<int> out;
    for (const auto& d : source_documents) {
        if (d.doc_type == DocType::OfficialReview && d.rating) out.push_back(*d.rating);
    }
    return out;
}

namespace {

void check_judgement_fields(const Judgement& j, const std::string& path,
                            std::vector<Violation>& out) {
    if (j.content_expression.empty()) {
        out.push_back({path + ".content_expression", "must be non-empty"});
    }
    if (j.sentiment_expression.empty()) {
        out.push_back({path + ".sentiment_expression", "must be non-empty"});
    }
    if (j.verbatim) {
        if (j.judgement_sentence.find(j.content_expression) == std::string::npos) {
            out.push_back({path + ".content_expression",
                           "verbatim judgement must contain the content expression in its "
                           "judgement sentence"});
        }
        if (j.judgement_sentence.find(j.sentiment_expression) == std::string::npos) {
            out.push_back({path + ".sentiment_expression",
                           "verbatim judgement must contain the sentiment expression in its "
                           "judgement sentence"});
        }
    }
    if (j.convincingness == ConvincingnessLevel::NotApplicable &&
        j.expresser != Expresser::Others) {
        out.push_back({path + ".convincingness",
                       "'Not applicable' is only valid when the expresser is Others"});
    }
}

}  // namespace

std::vector<Violation> check_judgement(const Judgement& j, const std::string& path) {
    std::vector<Violation> out;
    check_judgement_fields(j, path, out);
    return out;
}

std::vector<Violation> check_sample(const Sample& s) {
    std::vector<Violation> out;
    if (s.paper_id.empty()) {
        out.push_back({"paper_id", "must be non-empty"});
    }
    if (s.meta_review.doc_type != DocType::MetaReview) {
        out.push_back({"meta_review.doc_type", "must be meta_review"});
    }
    if (s.meta_review.rating) {
        out.push_back({"meta_review.rating", "rating is only valid on official reviews"});
    }

    std::unordered_set<std::string> seen_ids;
    seen_ids.insert(s.meta_review.doc_id);
    bool has_review = false;
    for (std::size_t i = 0; i < s.source_documents.size(); ++i) {
        const auto& d = s.source_documents[i];
        const std::string path = "source_documents[" + std::to_string(i) + "]";
        if (d.doc_id.empty()) {
            out.push_back({path + ".doc_id", "must be non-empty"});
        } else if (!seen_ids.insert(d.doc_id).second) {
            out.push_back({path + ".doc_id", "doc_id not unique: " + d.doc_id});
        }
        switch (d.doc_type) {
            case DocType::MetaReview:
                out.push_back({path + ".doc_type", "meta_review not allowed among source documents"});
                break;
            case DocType::OfficialReview:
                has_review = true;
                break;
            case DocType::Discussion:
                if (d.rating) {
                    out.push_back({path + ".rating", "rating is only valid on official reviews"});
                }
                break;
        }
        if (d.rating && (*d.rating < 1 || *d.rating > 10)) {
            out.push_back({path + ".rating", "must be in [1, 10]"});
        }
    }
    if (!has_review) {
        out.push_back({"source_documents", "at least one official review required"});
    }
    return out;
}

Sample validate_sample(Sample raw) {
    auto violations = check_sample(raw);
    if (!violations.empty()) {
        throw ValidationError(std::move(violations));
    }
    return raw;
}

}  // namespace metarev
