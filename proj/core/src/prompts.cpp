#include "metarev/prompts.hpp"

#include <algorithm>

#include "metarev/errors.hpp"

namespace metarev::llm {

namespace {

constexpr std::string_view kExtractExpressions =
    R"(Please read the document:

{{source_document}}

This task requires you to analyze the above document which is used to express opinions on the quality of a scientific manuscript. You are good at understanding the sentiment information with judgements in the document.
Please first identify the sentence with judgements only on the quality of scientific manuscripts based on the criteria facets for scientific peer-review: novelty, soundness, clarity, advancement, compliance and overall quality within the given document.
Once you have found a sentence that provides judgement in one or more of these areas, you then need to extract the specific expression of sentiment and the content it refers to.

The process can be broken into two steps:
1) Identify a judgement sentence that focuses on the quality of the manuscript based on the given criteria.

2) From the identified judgement sentence, extract two pieces of information: the sentiment expression and the content expression. The sentiment expression is the specific term or phrase that conveys the sentiment or opinion. The content expression pertains to the content that this sentiment is referring to.

Please provide the data in the following format:
{"judgement_sentence": "sentence", "content_expression": "content", "sentiment_expression": "sentiment"}

Here are a few examples for your reference:
{"judgement_sentence": "The writing of the paper is not well-written.", "content_expression": "The writing of the paper", "sentiment_expression": "not well-written"}
{"judgement_sentence": "Experimental results are not sufficiently substantiated.", "content_expression": "Experimental results", "sentiment_expression": "not sufficiently substantiated"}
{"judgement_sentence": "This paper presents two novel approaches to provide explanations for the similarity between two samples based on 1) the importance measure of individual features and 2) some of the other pairs of examples used as analogies.", "content_expression": "approaches", "sentiment_expression": "novel"}

The predicted judgments (following the same jsonline format of the above example):
)";

constexpr std::string_view kPredictComponents =
    R"(Please first read the document below:

{{source_document}}


Please predict the facet that the given judgements are talking about. You can refer to the context in the above source document.

Possible facets:

Novelty: How original the idea (e.g., tasks, datasets, or methods) is, and how clear where the problems and methods sit with respect to existing literature (i.e., meaningful comparison).

Soundness: (1) Empirical: how well experiments are designed and executed to support the claims, whether methods used are appropriate, and how correctly the data and results are reported, analysed, and interpreted. (2) Theoretical: whether arguments or claims in the manuscript are well supported by theoretical analysis, i.e., completeness and the methodology (e.g., mathematical approach) and the analysis is correct.

Clarity: The readability of the writing (e.g., structure and language), reproducibility of details, and how accurately what the research question is, what was done and what was the conclusion are presented.

Advancement: Importance of the manuscript to discipline, significance of the contributions of the manuscript, and its potential impact to the field.

Compliance: Whether the manuscript fits the venue, and all ethical and publication requirements are met.

Overall: Overall quality of the manuscript, not for specific facets.


You are also good at understanding sentiment information in the judgements.

Please predict the original expresser of the sentiment in the judgement sentence. You can refer to the context in the source document.

Possible sentiment expressers:

- Self: the sentiment is from the speaker
- Others: the sentiment is quoted from others


Please predict how well the sentiment in the judgement sentence is justified in the document in your understanding. You can refer to the context in the source document.

Possible sentiment convincingness:

- Not applicable: the sentiment is explicitly excerpted from others.
- Not at all: not convincing at all or when there is no justification. How well the sentiment is justified in the document in your understanding
- Slightly Convincing: there is some evidence or logical reasoning, but it might not be comprehensive.
- Highly Convincing: leaving little room for doubt.


Please predict the polarity and strength of the sentiment in the judgement sentence. You can refer to the context in the source document.

Possible sentiments polarities:

- Strong negative: very negative
- Negative: minor negative
- Positive: minor positive
- Strong positive: very positive


Judgements:
{{judgement_expressions}}

Your predictions for the above judgements (following the same jsonlines format, return the same number of lines, and keep the same content and sentiment expressions):
)";

constexpr std::string_view kPredictLevelFromJudgements =
    R"(You will be given source judgements from reviewers for a scientific manuscript. Your task is to implicitly write a meta-review for these judgements and predict the sentiment level based on these judgements.

Source Judgements:

{{source_judgements}}

Candidate Sentiment Levels:

- Strong negative
- Negative
- Positive
- Strong positive

Content Expression:

{{content_expression}}

Predict the sentiment level of the given content expression based on the above judgements. You must follow the following format.
{"Content Expression": the above content expression, "Sentiment Level": your predicted sentiment level}
)";

constexpr std::string_view kPredictLevelFromFullText =
    R"(You will be given multiple review documents for a scientific manuscript. Your task is to implicitly write a meta-review and  predict the sentiment level based on these documents.

Source Documents:

{{source_texts}}

Candidate Sentiment Levels:

- Strong negative
- Negative
- Positive
- Strong positive

Content Expression:

{{content_expression}}

Predict the sentiment level of the given content expression based on related information in the above documents. You must follow the following format.
{"Content Expression": the above content expression, "Sentiment Level": your predicted sentiment level}
)";

constexpr std::string_view kGenerateNaive =
    R"(Your task is to write a meta-review based on the following reviews and discussions for a scientific manuscript.

{{input_documents}}
)";

constexpr std::string_view kGenerateStepsAsk =
    R"(You are an experienced area chair for a scientific venue. Before writing anything, think about how a meta-review should be produced from the reviews and discussions for a manuscript.

List the steps you would follow to write a good meta-review. Only output the numbered steps, nothing else.
)";

constexpr std::string_view kGenerateStepsUse =
    R"(Your task is to write a meta-review based on the following reviews and discussions for a scientific manuscript.

{{input_documents}}

Following the underlying steps below will get you better generated meta-reviews.

{{generated_steps}}

You may follow these steps implicitly and only need to output the final meta-review. The final meta-review:
)";

constexpr std::string_view kGenerateGuided =
    R"(Your task is to write a meta-review based on the following reviews and discussions for a scientific manuscript.

{{input_documents}}

Following the underlying steps below will get you better generated meta-reviews.

1. Extracting content and sentiment expressions of judgements in all above review and discussion documents;

2. Predicting Criteria Facets, Sentiment Levels, and Convincingness Levels;
Candidate criteria facets: Novelty, Soundness, Clarity, Advancement, Compliance, and Overall quality
Candidate sentiment levels: Strong negative, Negative, Positive and Strong positive
Candidate convincingness levels:  Not at all, Slightly Convincing, Highly Convincing

3. Reorganize extracted judgements in different clusters for different criteria facets;

4. Generate a small summary for judgements on the same criteria facet with comparison and aggregation;

5. Aggregate judgements in different criteria facets and write a meta-review based on the aggregation.


You may follow these steps implicitly and only need to output the final meta-review. The final meta-review:
)";

constexpr std::string_view kSubSummary =
    R"({{input_judgements}}

Write a summary of the above judgements on {{criteria_facet}} of a manuscript.
)";

constexpr std::string_view kFinalFromSubSummaries =
    R"({{input_sub_summaries}}

Write a meta-review to summarize the above sub-summaries of reviews and discussions in different criteria facets for a manuscript.
)";

}  // namespace

std::string_view template_name(TemplateId id) {
    switch (id) {
        case TemplateId::ExtractExpressions: return "extract_expressions";
        case TemplateId::PredictComponents: return "predict_components";
        case TemplateId::PredictLevelFromJudgements: return "predict_level_from_judgements";
        case TemplateId::PredictLevelFromFullText: return "predict_level_from_full_text";
        case TemplateId::GenerateNaive: return "generate_naive";
        case TemplateId::GenerateStepsAsk: return "generate_steps_ask";
        case TemplateId::GenerateStepsUse: return "generate_steps_use";
        case TemplateId::GenerateGuided: return "generate_guided";
        case TemplateId::SubSummary: return "sub_summary";
        case TemplateId::FinalFromSubSummaries: return "final_from_sub_summaries";
    }
    return "unknown";
}

std::optional<TemplateId> parse_template_id(std::string_view name) {
    for (auto id : kAllTemplates) {
        if (template_name(id) == name) return id;
    }
    return std::nullopt;
}

std::string_view template_body(TemplateId id) {
    switch (id) {
        case TemplateId::ExtractExpressions: return kExtractExpressions;
        case TemplateId::PredictComponents: return kPredictComponents;
        case TemplateId::PredictLevelFromJudgements: return kPredictLevelFromJudgements;
        case TemplateId::PredictLevelFromFullText: return kPredictLevelFromFullText;
        case TemplateId::GenerateNaive: return kGenerateNaive;
        case TemplateId::GenerateStepsAsk: return kGenerateStepsAsk;
        case TemplateId::GenerateStepsUse: return kGenerateStepsUse;
        case TemplateId::GenerateGuided: return kGenerateGuided;
        case TemplateId::SubSummary: return kSubSummary;
        case TemplateId::FinalFromSubSummaries: return kFinalFromSubSummaries;
    }
    return {};
}

std::vector<std::string> template_placeholders(TemplateId id) {
    const std::string_view body = template_body(id);
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (true) {
        const auto open = body.find("{{", pos);
        if (open == std::string_view::npos) break;
        const auto close = body.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        std::string name(body.substr(open + 2, close - open - 2));
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            names.push_back(std::move(name));
        }
        pos = close + 2;
    }
    return names;
}

std::string render_prompt(TemplateId id, const Bindings& bindings) {
    const std::string_view body = template_body(id);
    std::string out;
    out.reserve(body.size());
    std::size_t pos = 0;
    while (pos < body.size()) {
        const auto open = body.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(body.substr(pos));
            break;
        }
        const auto close = body.find("}}", open + 2);
        if (close == std::string_view::npos) {
            out.append(body.substr(pos));
            break;
        }
        out.append(body.substr(pos, open - pos));
        const std::string name(body.substr(open + 2, close - open - 2));
        auto it = bindings.find(name);
        if (it == bindings.end()) {
            throw UnboundPlaceholder(name);
        }
        out.append(it->second);
        pos = close + 2;
    }
    return out;
}

}  // namespace metarev::llm
