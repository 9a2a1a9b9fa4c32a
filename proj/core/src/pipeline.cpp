#include "metarev/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <future>

#include "metarev/errors.hpp"
#include "metarev/serialize.hpp"

namespace metarev::pipeline {

namespace {

constexpr const char* kFormatReminder =
    "\nYour previous reply did not follow the required format. Follow the format exactly, one "
    "JSON object per line, and output nothing else.\n";

std::string run_completion(llm::Gateway& gateway, const PipelineOptions& opts,
                           llm::TemplateId id, const llm::Bindings& bindings,
                           const std::string& tag, StepRecorder* rec) {
    const std::string prompt = llm::render_prompt(id, bindings);
    llm::CompletionRequest request;
    request.prompt = prompt;
    request.model_id = opts.model_id;
    request.temperature = opts.temperature;
    request.max_tokens = opts.max_tokens;
    request.request_tag = tag;
    const auto result = gateway.complete(request);
    if (rec) rec->completion(tag, id, prompt, result.text);
    return result.text;
}

std::string run_raw_completion(llm::Gateway& gateway, const PipelineOptions& opts,
                               llm::TemplateId id, const std::string& prompt,
                               const std::string& tag, StepRecorder* rec) {
    llm::CompletionRequest request;
    request.prompt = prompt;
    request.model_id = opts.model_id;
    request.temperature = opts.temperature;
    request.max_tokens = opts.max_tokens;
    request.request_tag = tag;
    const auto result = gateway.complete(request);
    if (rec) rec->completion(tag, id, prompt, result.text);
    return result.text;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::vector<Judgement> same_facet(std::span<const Judgement> judgements, CriteriaFacet f) {
    std::vector<Judgement> out;
    for (const auto& j : judgements) {
        if (j.facet == f) out.push_back(j);
    }
    return out;
}

}  // namespace

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Naive: return "naive";
        case Strategy::LlmSteps: return "llm-steps";
        case Strategy::ConsolidationPrompt: return "consolidation-prompt";
        case Strategy::ConsolidationPipeline: return "consolidation-pipeline";
    }
    return "naive";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (auto s : kAllStrategies) {
        if (strategy_name(s) == name) return s;
    }
    return std::nullopt;
}

void StepRecorder::completion(std::string tag, llm::TemplateId id, const std::string& prompt,
                              const std::string& text) {
    CompletionTrace t;
    t.tag = std::move(tag);
    t.template_id = std::string(llm::template_name(id));
    t.prompt = prompt;
    t.completion = text;
    traces.push_back(std::move(t));
}

void StepRecorder::note(std::string n) {
    notes.push_back(std::move(n));
}

void StepRecorder::merge(StepRecorder&& other) {
    for (auto& t : other.traces) traces.push_back(std::move(t));
    for (auto& n : other.notes) notes.push_back(std::move(n));
}

std::string serialize_documents(const Sample& sample, std::size_t context_chars,
                                StepRecorder* rec) {
    // Reviews are never dropped; discussions go trailing-first when the
    // budget overflows.
    std::vector<const SourceDocument*> docs;
    for (const auto* d : sample.official_reviews()) docs.push_back(d);
    const auto discussions = sample.discussions();
    std::size_t n_discussions = discussions.size();
    for (const auto* d : discussions) docs.push_back(d);

    auto render = [&](std::size_t keep_discussions) {
        std::string out;
        std::size_t seen_discussions = 0;
        for (const auto* d : docs) {
            if (d->doc_type == DocType::Discussion) {
                if (seen_discussions >= keep_discussions) break;
                ++seen_discussions;
            }
            out += "[";
            out += doc_type_name(d->doc_type);
            out += "] ";
            out += d->doc_id;
            out += "\n";
            out += d->text;
            out += "\n\n";
        }
        return out;
    };

    std::string out = render(n_discussions);
    while (out.size() > context_chars && n_discussions > 0) {
        --n_discussions;
        out = render(n_discussions);
    }
    if (n_discussions < discussions.size() && rec) {
        rec->note("truncated " + std::to_string(discussions.size() - n_discussions) +
                  " trailing discussion document(s) to fit the context budget");
    }
    return out;
}

std::string expressions_jsonl(std::span<const Judgement> judgements) {
    std::string out;
    for (const auto& j : judgements) {
        OrderedJson obj;
        obj["judgement_sentence"] = j.judgement_sentence;
        obj["content_expression"] = j.content_expression;
        obj["sentiment_expression"] = j.sentiment_expression;
        out += obj.dump();
        out += "\n";
    }
    return out;
}

std::string judgements_jsonl(std::span<const Judgement> judgements) {
    std::string out;
    for (const auto& j : judgements) {
        OrderedJson obj;
        obj["content_expression"] = j.content_expression;
        obj["sentiment_expression"] = j.sentiment_expression;
        obj["sentiment_level"] = level_name(j.level);
        obj["convincingness_level"] = convincingness_name(j.convincingness);
        out += obj.dump();
        out += "\n";
    }
    return out;
}

std::vector<Judgement> extract_judgements(const SourceDocument& doc, llm::Gateway& gateway,
                                          const PipelineOptions& opts, StepRecorder* rec) {
    if (doc.text.empty()) {
        throw EmptyInput("document " + doc.doc_id + " has empty text");
    }
    const llm::Bindings bindings = {{"source_document", doc.text}};
    std::string reply = run_completion(gateway, opts, llm::TemplateId::ExtractExpressions,
                                       bindings, "extract:" + doc.doc_id, rec);
    auto parsed = llm::parse_judgement_lines(reply);
    if (parsed.all_lines_failed && opts.strict_retry) {
        const std::string retry_prompt =
            llm::render_prompt(llm::TemplateId::ExtractExpressions, bindings) + kFormatReminder;
        reply = run_raw_completion(gateway, opts, llm::TemplateId::ExtractExpressions,
                                   retry_prompt, "extract-retry:" + doc.doc_id, rec);
        parsed = llm::parse_judgement_lines(reply);
    }
    if (rec) {
        for (const auto& d : parsed.diagnostics) {
            rec->note("extract " + doc.doc_id + " line " + std::to_string(d.line_no) + ": " +
                      d.reason);
        }
        if (parsed.all_lines_failed) {
            rec->note("extract " + doc.doc_id + ": empty extraction");
        }
    }
    std::vector<Judgement> out;
    out.reserve(parsed.records.size());
    for (auto& r : parsed.records) {
        Judgement j;
        j.verbatim = contains(r.judgement_sentence, r.content_expression) &&
                     contains(r.judgement_sentence, r.sentiment_expression) &&
                     contains(doc.text, r.content_expression) &&
                     contains(doc.text, r.sentiment_expression);
        j.judgement_sentence = std::move(r.judgement_sentence);
        j.content_expression = std::move(r.content_expression);
        j.sentiment_expression = std::move(r.sentiment_expression);
        j.doc_id = doc.doc_id;
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Judgement> predict_components(const SourceDocument& doc,
                                          std::span<const Judgement> partial,
                                          llm::Gateway& gateway, const PipelineOptions& opts,
                                          StepRecorder* rec) {
    if (partial.empty()) {
        throw EmptyInput("component prediction needs at least one judgement");
    }
    std::vector<llm::ExpressionRecord> inputs;
    inputs.reserve(partial.size());
    for (const auto& j : partial) {
        inputs.push_back({j.judgement_sentence, j.content_expression, j.sentiment_expression});
    }
    const llm::Bindings bindings = {
        {"source_document", doc.text},
        {"judgement_expressions", expressions_jsonl(partial)},
    };
    const std::string reply = run_completion(gateway, opts, llm::TemplateId::PredictComponents,
                                             bindings, "components:" + doc.doc_id, rec);
    const auto parsed = llm::parse_component_lines(reply, inputs);
    if (rec) {
        for (const auto& d : parsed.diagnostics) {
            rec->note("components " + doc.doc_id + " line " + std::to_string(d.line_no) + ": " +
                      d.reason);
        }
    }
    std::vector<Judgement> out;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        if (!parsed.assigned[i]) {
            if (rec) {
                rec->note("components " + doc.doc_id + ": judgement " + std::to_string(i) +
                          " dropped (no usable prediction line)");
            }
            continue;
        }
        Judgement j = partial[i];
        const auto& r = *parsed.assigned[i];
        j.facet = r.facet;
        j.level = r.level;
        j.convincingness = r.convincingness;
        j.expresser = r.expresser;
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Judgement> extract_complete_judgements(const SourceDocument& doc,
                                                   llm::Gateway& gateway,
                                                   const PipelineOptions& opts,
                                                   StepRecorder* rec) {
    auto partial = extract_judgements(doc, gateway, opts, rec);
    if (partial.empty()) return {};
    return predict_components(doc, partial, gateway, opts, rec);
}

std::vector<Judgement> extract_source_judgements(const Sample& sample, llm::Gateway& gateway,
                                                 const PipelineOptions& opts, StepRecorder* rec) {
    std::vector<const SourceDocument*> docs;
    for (const auto* d : sample.official_reviews()) docs.push_back(d);
    for (const auto* d : sample.discussions()) docs.push_back(d);

    std::vector<std::vector<Judgement>> per_doc(docs.size());
    std::vector<StepRecorder> per_doc_rec(docs.size());

    if (opts.doc_concurrency > 1 && docs.size() > 1) {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min(opts.doc_concurrency, docs.size());
        for (std::size_t w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&]() {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= docs.size()) return;
                    per_doc[i] =
                        extract_complete_judgements(*docs[i], gateway, opts, &per_doc_rec[i]);
                }
            }));
        }
        for (auto& f : futures) f.get();  // rethrows the first failure
    } else {
        for (std::size_t i = 0; i < docs.size(); ++i) {
            per_doc[i] = extract_complete_judgements(*docs[i], gateway, opts, &per_doc_rec[i]);
        }
    }

    std::vector<Judgement> out;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (rec) rec->merge(std::move(per_doc_rec[i]));
        for (auto& j : per_doc[i]) out.push_back(std::move(j));
    }
    return out;
}

std::vector<FacetCluster> cluster_by_facet(std::span<const Judgement> judgements) {
    std::vector<FacetCluster> clusters;
    for (const auto f : kAllFacets) {
        FacetCluster c;
        c.facet = f;
        for (const auto& j : judgements) {
            if (j.facet == f) c.judgements.push_back(j);
        }
        if (!c.judgements.empty()) clusters.push_back(std::move(c));
    }
    return clusters;
}

Evidence Evidence::from_judgements(std::vector<Judgement> js) {
    Evidence e;
    e.kind = Kind::Judgements;
    e.judgements = std::move(js);
    return e;
}

Evidence Evidence::from_full_text(std::string text) {
    Evidence e;
    e.kind = Kind::FullText;
    e.full_text = std::move(text);
    return e;
}

SentimentLevel predict_meta_sentiment(const std::string& content_expression,
                                      const Evidence& evidence, llm::Gateway& gateway,
                                      const PipelineOptions& opts, StepRecorder* rec) {
    if (evidence.kind == Evidence::Kind::Judgements && evidence.judgements.empty()) {
        throw EmptyInput("sentiment prediction needs non-empty evidence");
    }
    if (evidence.kind == Evidence::Kind::FullText && evidence.full_text.empty()) {
        throw EmptyInput("sentiment prediction needs non-empty evidence");
    }
    const bool from_judgements = evidence.kind == Evidence::Kind::Judgements;
    const llm::TemplateId id = from_judgements ? llm::TemplateId::PredictLevelFromJudgements
                                               : llm::TemplateId::PredictLevelFromFullText;
    llm::Bindings bindings;
    bindings["content_expression"] = content_expression;
    if (from_judgements) {
        bindings["source_judgements"] = judgements_jsonl(evidence.judgements);
    } else {
        bindings["source_texts"] = evidence.full_text;
    }
    std::string reply =
        run_completion(gateway, opts, id, bindings, "predict-level", rec);
    auto parsed = llm::parse_level_reply(reply);
    if (!parsed) {
        // One strict retry with a format reminder, then give up.
        const std::string retry_prompt = llm::render_prompt(id, bindings) + kFormatReminder;
        reply = run_raw_completion(gateway, opts, id, retry_prompt, "predict-level-retry", rec);
        parsed = llm::parse_level_reply(reply);
    }
    if (!parsed) {
        throw UnparseableReply("no sentiment level object in completion");
    }
    return parsed->level;
}

namespace {

GenerationOutcome generate_with(const Sample& sample, Strategy strategy, llm::Gateway& gateway,
                                const PipelineOptions& opts) {
    GenerationOutcome outcome;
    StepRecorder rec;

    switch (strategy) {
        case Strategy::Naive: {
            const std::string docs = serialize_documents(sample, opts.context_chars, &rec);
            outcome.text = run_completion(gateway, opts, llm::TemplateId::GenerateNaive,
                                          {{"input_documents", docs}}, "generate", &rec);
            break;
        }
        case Strategy::LlmSteps: {
            const std::string steps = run_completion(gateway, opts, llm::TemplateId::GenerateStepsAsk,
                                                     {}, "steps-ask", &rec);
            const std::string docs = serialize_documents(sample, opts.context_chars, &rec);
            outcome.text = run_completion(
                gateway, opts, llm::TemplateId::GenerateStepsUse,
                {{"input_documents", docs}, {"generated_steps", steps}}, "generate", &rec);
            break;
        }
        case Strategy::ConsolidationPrompt: {
            const std::string docs = serialize_documents(sample, opts.context_chars, &rec);
            outcome.text = run_completion(gateway, opts, llm::TemplateId::GenerateGuided,
                                          {{"input_documents", docs}}, "generate", &rec);
            break;
        }
        case Strategy::ConsolidationPipeline: {
            const auto judgements = extract_source_judgements(sample, gateway, opts, &rec);
            outcome.entry.judgements = judgements;
            const auto clusters = cluster_by_facet(judgements);
            std::string sub_summaries;
            for (const auto& cluster : clusters) {
                const std::string summary = run_completion(
                    gateway, opts, llm::TemplateId::SubSummary,
                    {{"input_judgements", judgements_jsonl(cluster.judgements)},
                     {"criteria_facet", std::string(facet_name(cluster.facet))}},
                    "sub-summary:" + std::string(facet_name(cluster.facet)), &rec);
                sub_summaries += facet_name(cluster.facet);
                sub_summaries += ":\n";
                sub_summaries += summary;
                sub_summaries += "\n\n";
            }
            outcome.text = run_completion(gateway, opts, llm::TemplateId::FinalFromSubSummaries,
                                          {{"input_sub_summaries", sub_summaries}}, "generate",
                                          &rec);
            break;
        }
    }

    outcome.entry.paper_id = sample.paper_id;
    outcome.entry.strategy = std::string(strategy_name(strategy));
    outcome.entry.completions = std::move(rec.traces);
    outcome.entry.notes = std::move(rec.notes);
    outcome.entry.generated_text = outcome.text;
    return outcome;
}

}  // namespace

GenerationOutcome generate_meta_review(const Sample& sample, Strategy strategy,
                                       llm::Gateway& gateway, const PipelineOptions& opts) {
    GenerationOutcome outcome;
    try {
        return generate_with(sample, strategy, gateway, opts);
    } catch (const BackendError& e) {
        outcome.backend_failure = true;
        outcome.entry.error = e.what();
    } catch (const std::exception& e) {
        outcome.entry.error = e.what();
    }
    outcome.entry.paper_id = sample.paper_id;
    outcome.entry.strategy = std::string(strategy_name(strategy));
    outcome.entry.failed = true;
    return outcome;
}

std::optional<metrics::FusionEvalScore> fusion_from_judgements(
    std::span<const Judgement> meta_judgements, std::span<const Judgement> source_judgements,
    llm::Gateway& gateway, const PipelineOptions& opts, StepRecorder* rec) {
    if (source_judgements.empty()) {
        throw EmptyInput("fusion evaluation needs source judgements");
    }
    if (meta_judgements.empty()) {
        if (rec) rec->note("fusion: no meta-review judgements, score absent");
        return std::nullopt;
    }
    std::vector<SentimentLevel> extracted;
    std::vector<SentimentLevel> predicted;
    for (const auto& j : meta_judgements) {
        auto evidence_judgements = same_facet(source_judgements, j.facet);
        if (evidence_judgements.empty()) {
            if (rec) {
                rec->note("fusion: no same-facet source judgements for '" +
                          std::string(facet_name(j.facet)) + "', falling back to all");
            }
            evidence_judgements.assign(source_judgements.begin(), source_judgements.end());
        }
        const auto level = predict_meta_sentiment(
            j.content_expression, Evidence::from_judgements(std::move(evidence_judgements)),
            gateway, opts, rec);
        extracted.push_back(j.level);
        predicted.push_back(level);
    }
    return metrics::fusion_accuracy(extracted, predicted);
}

std::optional<metrics::FusionEvalScore> compute_fusion_eval(
    const std::string& generated_text, std::span<const Judgement> source_judgements,
    llm::Gateway& gateway, const PipelineOptions& opts, StepRecorder* rec) {
    if (source_judgements.empty()) {
        throw EmptyInput("fusion evaluation needs source judgements");
    }
    SourceDocument doc;
    doc.doc_id = "generated_meta_review";
    doc.doc_type = DocType::MetaReview;
    doc.text = generated_text;
    const auto meta_judgements = extract_complete_judgements(doc, gateway, opts, rec);
    return fusion_from_judgements(meta_judgements, source_judgements, gateway, opts, rec);
}

PredictionAccuracyReport sentiment_prediction_accuracy(std::span<const Judgement> gold,
                                                       std::span<const Judgement> source_judgements,
                                                       const Sample& sample, EvidenceMode mode,
                                                       llm::Gateway& gateway,
                                                       const PipelineOptions& opts,
                                                       StepRecorder* rec) {
    std::array<std::size_t, kFacetCount> correct{};
    std::array<std::size_t, kFacetCount> total{};
    PredictionAccuracyReport report;
    for (const auto& g : gold) {
        Evidence evidence;
        if (mode == EvidenceMode::Judgements) {
            auto ev = same_facet(source_judgements, g.facet);
            if (ev.empty()) {
                if (rec) {
                    rec->note("prediction: no same-facet source judgements for '" +
                              std::string(facet_name(g.facet)) + "', falling back to all");
                }
                ev.assign(source_judgements.begin(), source_judgements.end());
            }
            evidence = Evidence::from_judgements(std::move(ev));
        } else {
            evidence = Evidence::from_full_text(
                serialize_documents(sample, opts.context_chars, rec));
        }
        try {
            const auto level =
                predict_meta_sentiment(g.content_expression, evidence, gateway, opts, rec);
            ++total[facet_index(g.facet)];
            ++report.evaluated;
            if (level == g.level) ++correct[facet_index(g.facet)];
        } catch (const Error& e) {
            ++report.skipped;
            if (rec) rec->note(std::string("prediction skipped: ") + e.what());
        }
    }
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        if (total[f] > 0) {
            report.per_facet[f] =
                static_cast<double>(correct[f]) / static_cast<double>(total[f]);
        }
    }
    return report;
}

ScoreTable evaluate_run(std::span<const EvaluateInput> inputs, llm::Gateway& gateway,
                        const PipelineOptions& opts, const EvaluateOptions& eval_opts,
                        RunRecord* record) {
    ScoreTable table;
    double facet_sum = 0, r1_sum = 0, r2_sum = 0, rl_sum = 0, fusion_sum = 0;
    std::size_t scored = 0, fusion_scored = 0;

    for (const auto& input : inputs) {
        const Sample& sample = *input.sample;
        SampleScores row;
        row.paper_id = sample.paper_id;
        StepRecorder rec;
        RunEntry entry;
        entry.paper_id = sample.paper_id;
        entry.strategy = "evaluate";
        entry.generated_text = input.generated_text;
        try {
            // Judgements of the generated text.
            SourceDocument generated_doc;
            generated_doc.doc_id = "generated:" + sample.paper_id;
            generated_doc.doc_type = DocType::MetaReview;
            generated_doc.text = input.generated_text;
            const auto gen_judgements =
                extract_complete_judgements(generated_doc, gateway, opts, &rec);
            entry.judgements = gen_judgements;

            // Judgements of the human reference: annotator-supplied when
            // preferred and available, machine-extracted otherwise.
            std::vector<Judgement> human_judgements;
            bool from_annotations = false;
            if (eval_opts.prefer_reference_annotations) {
                for (const auto& set : eval_opts.annotations) {
                    if (set.doc_id == sample.meta_review.doc_id) {
                        human_judgements.insert(human_judgements.end(), set.judgements.begin(),
                                                set.judgements.end());
                        from_annotations = true;
                    }
                }
            }
            if (from_annotations) {
                rec.note("reference judgements from annotations");
            } else {
                human_judgements =
                    extract_complete_judgements(sample.meta_review, gateway, opts, &rec);
            }

            row.facet_eval = metrics::facet_eval(human_judgements, gen_judgements).value;
            row.rouge =
                rouge::rouge_suite(input.generated_text, sample.meta_review.text,
                                   eval_opts.tokenize);

            const auto source_judgements =
                extract_source_judgements(sample, gateway, opts, &rec);
            if (source_judgements.empty()) {
                rec.note("fusion: no source judgements extracted, score absent");
            } else {
                const auto fusion = fusion_from_judgements(gen_judgements, source_judgements,
                                                           gateway, opts, &rec);
                if (fusion) row.fusion_eval = fusion->accuracy;
            }

            facet_sum += row.facet_eval;
            r1_sum += row.rouge.r1.f1;
            r2_sum += row.rouge.r2.f1;
            rl_sum += row.rouge.rl.f1;
            ++scored;
            if (row.fusion_eval) {
                fusion_sum += *row.fusion_eval;
                ++fusion_scored;
            } else {
                ++table.fusion_absent_count;
            }
        } catch (const BackendError& e) {
            row.excluded = true;
            row.backend_failure = true;
            row.error = e.what();
            ++table.excluded_count;
            entry.failed = true;
            entry.error = e.what();
        } catch (const std::exception& e) {
            row.excluded = true;
            row.error = e.what();
            ++table.excluded_count;
            entry.failed = true;
            entry.error = e.what();
        }
        if (record) {
            entry.completions = std::move(rec.traces);
            entry.notes = std::move(rec.notes);
            entry.scores.emplace_back("facet_eval", row.facet_eval);
            if (row.fusion_eval) entry.scores.emplace_back("fusion_eval", *row.fusion_eval);
            entry.scores.emplace_back("rouge1_f1", row.rouge.r1.f1);
            entry.scores.emplace_back("rouge2_f1", row.rouge.r2.f1);
            entry.scores.emplace_back("rougel_f1", row.rouge.rl.f1);
            record->entries.push_back(std::move(entry));
        }
        table.rows.push_back(std::move(row));
    }

    if (scored > 0) {
        table.facet_mean = facet_sum / static_cast<double>(scored);
        table.rouge1_mean = r1_sum / static_cast<double>(scored);
        table.rouge2_mean = r2_sum / static_cast<double>(scored);
        table.rougel_mean = rl_sum / static_cast<double>(scored);
    }
    if (fusion_scored > 0) {
        table.fusion_mean = fusion_sum / static_cast<double>(fusion_scored);
    }
    return table;
}

}  // namespace metarev::pipeline
