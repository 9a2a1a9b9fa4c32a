#pragma once

// Strict, never-throwing parsers for structured model output. Lines that do
// not conform are skipped and reported as diagnostics, not errors: model
// output is untrusted input.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metarev/domain.hpp"

namespace metarev::llm {

struct ParseDiagnostic {
    std::size_t line_no = 0;  // 1-based within the raw completion, 0 = global
    std::string reason;
};

struct ExpressionRecord {
    std::string judgement_sentence;
    std::string content_expression;
    std::string sentiment_expression;
};

struct ExpressionParse {
    std::vector<ExpressionRecord> records;
    std::vector<ParseDiagnostic> diagnostics;
    /// Non-empty input produced zero records.
    bool all_lines_failed = false;
};

/// Scans the completion line by line for objects carrying the three
/// required string fields. Markdown fences and surrounding prose are
/// tolerated; malformed lines are skipped with a diagnostic.
ExpressionParse parse_judgement_lines(std::string_view raw);

struct ComponentRecord {
    std::string content_expression;
    std::string sentiment_expression;
    CriteriaFacet facet = CriteriaFacet::Overall;
    SentimentLevel level = SentimentLevel::Positive;
    ConvincingnessLevel convincingness = ConvincingnessLevel::NotAtAll;
    Expresser expresser = Expresser::Self;
};

struct ComponentParse {
    /// Index-aligned with the input judgements; nullopt where no line could
    /// be associated or its labels failed to parse.
    std::vector<std::optional<ComponentRecord>> assigned;
    std::vector<ParseDiagnostic> diagnostics;
    bool count_mismatch = false;
    std::size_t lines_parsed = 0;
};

/// Parses component-prediction lines and re-associates them with the input
/// judgements: exact content-expression match first, position second.
ComponentParse parse_component_lines(std::string_view raw,
                                     std::span<const ExpressionRecord> inputs);

struct LevelReply {
    std::string content_expression;
    SentimentLevel level = SentimentLevel::Positive;
};

/// Extracts the single {"Content Expression", "Sentiment Level"} object a
/// fusion-prediction reply must contain. Nullopt when no line parses.
std::optional<LevelReply> parse_level_reply(std::string_view raw);

}  // namespace metarev::llm
