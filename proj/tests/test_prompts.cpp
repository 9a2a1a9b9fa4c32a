#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "metarev/errors.hpp"
#include "metarev/prompts.hpp"

using namespace metarev;
using namespace metarev::llm;

TEST_CASE("template names round-trip") {
    for (auto id : kAllTemplates) {
        CHECK(parse_template_id(template_name(id)) == id);
    }
    CHECK(parse_template_id("nonsense") == std::nullopt);
}

TEST_CASE("placeholders are discovered per template") {
    CHECK(template_placeholders(TemplateId::ExtractExpressions) ==
          std::vector<std::string>{"source_document"});
    CHECK(template_placeholders(TemplateId::PredictComponents) ==
          std::vector<std::string>{"source_document", "judgement_expressions"});
    CHECK(template_placeholders(TemplateId::PredictLevelFromJudgements) ==
          std::vector<std::string>{"source_judgements", "content_expression"});
    CHECK(template_placeholders(TemplateId::PredictLevelFromFullText) ==
          std::vector<std::string>{"source_texts", "content_expression"});
    CHECK(template_placeholders(TemplateId::GenerateNaive) ==
          std::vector<std::string>{"input_documents"});
    CHECK(template_placeholders(TemplateId::GenerateStepsAsk).empty());
    CHECK(template_placeholders(TemplateId::GenerateStepsUse) ==
          std::vector<std::string>{"input_documents", "generated_steps"});
    CHECK(template_placeholders(TemplateId::GenerateGuided) ==
          std::vector<std::string>{"input_documents"});
    CHECK(template_placeholders(TemplateId::SubSummary) ==
          std::vector<std::string>{"input_judgements", "criteria_facet"});
    CHECK(template_placeholders(TemplateId::FinalFromSubSummaries) ==
          std::vector<std::string>{"input_sub_summaries"});
}

TEST_CASE("render_prompt substitutes exactly and keeps the document verbatim") {
    const std::string doc = "The method is sound.\nIt was tested on 3 datasets.";
    const auto prompt =
        render_prompt(TemplateId::ExtractExpressions, {{"source_document", doc}});
    CHECK(prompt.find(doc) != std::string::npos);
    CHECK(prompt.find("{{") == std::string::npos);
    // Rendering is byte-stable.
    CHECK(prompt == render_prompt(TemplateId::ExtractExpressions, {{"source_document", doc}}));
}

TEST_CASE("render_prompt reports the missing placeholder by name") {
    try {
        render_prompt(TemplateId::ExtractExpressions, {});
        FAIL("expected UnboundPlaceholder");
    } catch (const UnboundPlaceholder& e) {
        CHECK(e.name() == "source_document");
    }
    // Extra bindings are allowed.
    CHECK_NOTHROW(render_prompt(TemplateId::GenerateStepsAsk, {{"unused", "x"}}));
}

TEST_CASE("sub-summary prompt places the facet in the instruction") {
    const auto prompt = render_prompt(
        TemplateId::SubSummary,
        {{"input_judgements", "{\"content_expression\": \"x\"}"}, {"criteria_facet", "Novelty"}});
    CHECK(prompt.find("on Novelty of a manuscript") != std::string::npos);
}

TEST_CASE("placeholder markers inside bound values are not re-expanded") {
    const auto prompt = render_prompt(TemplateId::GenerateNaive,
                                      {{"input_documents", "literal {{marker}} stays"}});
    CHECK(prompt.find("literal {{marker}} stays") != std::string::npos);
}

TEST_CASE("distinct bindings give distinct prompts") {
    std::set<std::string> rendered;
    for (int i = 0; i < 20; ++i) {
        rendered.insert(render_prompt(TemplateId::GenerateNaive,
                                      {{"input_documents", "doc " + std::to_string(i)}}));
    }
    CHECK(rendered.size() == 20);
}

TEST_CASE("the guided generation prompt spells out the five consolidation steps") {
    const auto prompt = render_prompt(TemplateId::GenerateGuided, {{"input_documents", "D"}});
    CHECK(prompt.find("1. Extracting content and sentiment expressions") != std::string::npos);
    CHECK(prompt.find("5. Aggregate judgements in different criteria facets") != std::string::npos);
    CHECK(prompt.find("only need to output the final meta-review") != std::string::npos);
}

TEST_CASE("component prediction prompt enumerates the label sets") {
    const auto prompt = render_prompt(
        TemplateId::PredictComponents,
        {{"source_document", "D"}, {"judgement_expressions", "J"}});
    for (const char* label : {"Novelty:", "Soundness:", "Clarity:", "Advancement:", "Compliance:",
                              "Overall:", "- Self:", "- Others:", "- Not applicable:",
                              "- Strong negative:", "- Strong positive:"}) {
        CHECK(prompt.find(label) != std::string::npos);
    }
}
