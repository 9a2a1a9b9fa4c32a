#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metarev/corpus.hpp"
#include "metarev/domain.hpp"
#include "metarev/gateway.hpp"
#include "metarev/metrics.hpp"
#include "metarev/output_parse.hpp"
#include "metarev/prompts.hpp"
#include "metarev/rouge.hpp"
#include "metarev/run_record.hpp"

namespace metarev::pipeline {

enum class Strategy {
    Naive,                  // one bare completion over the concatenated documents
    LlmSteps,               // model writes its own step list, then generates with it
    ConsolidationPrompt,    // one completion with the consolidation steps spelled out
    ConsolidationPipeline,  // extract -> components -> cluster -> facet summaries -> final
};

inline constexpr Strategy kAllStrategies[] = {
    Strategy::Naive,
    Strategy::LlmSteps,
    Strategy::ConsolidationPrompt,
    Strategy::ConsolidationPipeline,
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct PipelineOptions {
    std::string model_id = "gpt-4";
    double temperature = 0.0;
    int max_tokens = 1024;
    /// Prompt budget for concatenated documents; trailing discussions are
    /// dropped first when over budget, official reviews never.
    std::size_t context_chars = 48000;
    /// Retry a non-parsing completion once with a format reminder.
    bool strict_retry = false;
    std::size_t doc_concurrency = 1;
};

/// Collects the prompt/completion exchanges and notes of one sample's
/// processing, ready to drop into a RunEntry.
struct StepRecorder {
    std::vector<CompletionTrace> traces;
    std::vector<std::string> notes;

    void completion(std::string tag, llm::TemplateId id, const std::string& prompt,
                    const std::string& text);
    void note(std::string n);
    void merge(StepRecorder&& other);
};

/// Reviews first (corpus order), then discussions, each prefixed with a
/// one-line header naming id and type.
std::string serialize_documents(const Sample& sample, std::size_t context_chars,
                                StepRecorder* rec = nullptr);

/// JSONL rendering of partial judgements (sentence + expressions), the
/// format component prediction consumes.
std::string expressions_jsonl(std::span<const Judgement> judgements);

/// JSONL rendering with predicted components, used as fusion and
/// sub-summary evidence.
std::string judgements_jsonl(std::span<const Judgement> judgements);

/// Step 1: pull partial judgements (expressions only) out of one document.
/// Throws EmptyInput on empty text; an unparseable completion yields an
/// empty list plus a recorded warning.
std::vector<Judgement> extract_judgements(const SourceDocument& doc, llm::Gateway& gateway,
                                          const PipelineOptions& opts,
                                          StepRecorder* rec = nullptr);

/// Step 2: fill facet / level / convincingness / expresser on the partial
/// judgements. Lines that fail label parsing are dropped with diagnostics.
std::vector<Judgement> predict_components(const SourceDocument& doc,
                                          std::span<const Judgement> partial,
                                          llm::Gateway& gateway, const PipelineOptions& opts,
                                          StepRecorder* rec = nullptr);

/// Steps 1+2 for one document.
std::vector<Judgement> extract_complete_judgements(const SourceDocument& doc,
                                                   llm::Gateway& gateway,
                                                   const PipelineOptions& opts,
                                                   StepRecorder* rec = nullptr);

/// Steps 1+2 across all of a sample's source documents (reviews first),
/// optionally fanning out per document.
std::vector<Judgement> extract_source_judgements(const Sample& sample, llm::Gateway& gateway,
                                                 const PipelineOptions& opts,
                                                 StepRecorder* rec = nullptr);

struct FacetCluster {
    CriteriaFacet facet = CriteriaFacet::Overall;
    std::vector<Judgement> judgements;
};

/// Step 3: stable partition in canonical facet order; empty facets omitted.
std::vector<FacetCluster> cluster_by_facet(std::span<const Judgement> judgements);

struct Evidence {
    enum class Kind { Judgements, FullText };
    Kind kind = Kind::Judgements;
    std::vector<Judgement> judgements;
    std::string full_text;

    static Evidence from_judgements(std::vector<Judgement> js);
    static Evidence from_full_text(std::string text);
};

/// Zero-shot fusion: predict the consolidated sentiment level for one
/// content expression. Retries once with a format reminder, then throws
/// UnparseableReply.
SentimentLevel predict_meta_sentiment(const std::string& content_expression,
                                      const Evidence& evidence, llm::Gateway& gateway,
                                      const PipelineOptions& opts, StepRecorder* rec = nullptr);

struct GenerationOutcome {
    std::string text;
    RunEntry entry;  // failed + error set when a step aborted the sample
    bool backend_failure = false;
};

GenerationOutcome generate_meta_review(const Sample& sample, Strategy strategy,
                                       llm::Gateway& gateway, const PipelineOptions& opts);

/// Fusion consistency from pre-extracted meta-review judgements: for each,
/// predict the level from same-facet source judgements (all of them as
/// fallback, noted) and score exact matches. Nullopt when there is nothing
/// to score.
std::optional<metrics::FusionEvalScore> fusion_from_judgements(
    std::span<const Judgement> meta_judgements, std::span<const Judgement> source_judgements,
    llm::Gateway& gateway, const PipelineOptions& opts, StepRecorder* rec = nullptr);

/// Full fusion evaluation of a generated text: extract judgements from it,
/// then fusion_from_judgements. Absent (never 0) when extraction finds no
/// judgements. Throws EmptyInput when source_judgements is empty.
std::optional<metrics::FusionEvalScore> compute_fusion_eval(
    const std::string& generated_text, std::span<const Judgement> source_judgements,
    llm::Gateway& gateway, const PipelineOptions& opts, StepRecorder* rec = nullptr);

enum class EvidenceMode { Judgements, FullText };

struct PredictionAccuracyReport {
    /// Accuracy per facet, canonical order; absent when the facet had no
    /// gold judgements.
    std::array<std::optional<double>, kFacetCount> per_facet;
    std::size_t evaluated = 0;
    std::size_t skipped = 0;
};

/// How well zero-shot fusion recovers gold meta-review levels from source
/// evidence, per facet.
PredictionAccuracyReport sentiment_prediction_accuracy(std::span<const Judgement> gold,
                                                       std::span<const Judgement> source_judgements,
                                                       const Sample& sample, EvidenceMode mode,
                                                       llm::Gateway& gateway,
                                                       const PipelineOptions& opts,
                                                       StepRecorder* rec = nullptr);

struct EvaluateInput {
    const Sample* sample = nullptr;
    std::string generated_text;
};

struct EvaluateOptions {
    /// Prefer annotator judgements for the human meta-review when a set for
    /// its doc_id exists; machine extraction otherwise.
    bool prefer_reference_annotations = false;
    std::span<const AnnotationSet> annotations = {};
    rouge::TokenizeOptions tokenize = {};
};

struct SampleScores {
    std::string paper_id;
    std::optional<double> fusion_eval;  // absent when nothing extractable
    double facet_eval = 0.0;
    rouge::RougeSuite rouge;
    bool excluded = false;
    bool backend_failure = false;
    std::string error;
};

struct ScoreTable {
    std::vector<SampleScores> rows;
    std::optional<double> fusion_mean;
    double facet_mean = 0.0;
    double rouge1_mean = 0.0;
    double rouge2_mean = 0.0;
    double rougel_mean = 0.0;
    std::size_t excluded_count = 0;
    std::size_t fusion_absent_count = 0;
};

/// Scores one generated text per sample: FusionEval, FacetEval and ROUGE
/// against the human meta-review. Per-sample failures are excluded from
/// the means and counted. When `record` is given, one entry per sample is
/// appended with all exchanged prompts.
ScoreTable evaluate_run(std::span<const EvaluateInput> inputs, llm::Gateway& gateway,
                        const PipelineOptions& opts, const EvaluateOptions& eval_opts,
                        RunRecord* record = nullptr);

}  // namespace metarev::pipeline
