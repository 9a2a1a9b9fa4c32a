#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metarev::llm {

enum class TemplateId {
    ExtractExpressions,         // pull judgement sentences + expressions out of a document
    PredictComponents,          // fill facet / expresser / convincingness / level
    PredictLevelFromJudgements, // fuse same-facet judgements into one level
    PredictLevelFromFullText,   // same, but from full document texts
    GenerateNaive,              // bare generation instruction
    GenerateStepsAsk,           // ask the model for its own step list
    GenerateStepsUse,           // generate following the model's own steps
    GenerateGuided,             // generation with the consolidation steps spelled out
    SubSummary,                 // summarize one facet cluster
    FinalFromSubSummaries,      // synthesize the meta-review from facet summaries
};

inline constexpr TemplateId kAllTemplates[] = {
    TemplateId::ExtractExpressions,  TemplateId::PredictComponents,
    TemplateId::PredictLevelFromJudgements, TemplateId::PredictLevelFromFullText,
    TemplateId::GenerateNaive,       TemplateId::GenerateStepsAsk,
    TemplateId::GenerateStepsUse,    TemplateId::GenerateGuided,
    TemplateId::SubSummary,          TemplateId::FinalFromSubSummaries,
};

std::string_view template_name(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view name);

/// The template body with its {{placeholder}} markers.
std::string_view template_body(TemplateId id);

/// Placeholder names in order of first appearance.
std::vector<std::string> template_placeholders(TemplateId id);

using Bindings = std::map<std::string, std::string>;

/// Substitutes every {{name}} with its binding, byte-exactly and in a
/// single pass (markers inside substituted values stay untouched). Throws
/// UnboundPlaceholder for any marker without a binding; unused bindings
/// are ignored.
std::string render_prompt(TemplateId id, const Bindings& bindings);

}  // namespace metarev::llm
