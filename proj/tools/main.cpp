// metarev: extract judgements from peer-review documents, generate
// meta-reviews with four prompting strategies, and evaluate the results
// (FusionEval, FacetEval, ROUGE, agreement and consistency analyses).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metarev/agreement.hpp"
#include "metarev/corpus.hpp"
#include "metarev/errors.hpp"
#include "metarev/gateway.hpp"
#include "metarev/metrics.hpp"
#include "metarev/pipeline.hpp"
#include "metarev/run_record.hpp"
#include "metarev/serialize.hpp"
#include "metarev/text.hpp"

namespace fs = std::filesystem;
using namespace metarev;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitPartial = 4;

struct RunConfig {
    std::string corpus;
    std::string model_id = "gpt-4";
    std::string base_url = "https://api.openai.com/v1";
    double temperature = 0.0;
    int max_tokens = 1024;
    int concurrency = 4;
    int requests_per_minute = 60;
    double threshold = 2.0;
    bool stemming = false;
    std::string strategy = "consolidation-pipeline";
    int min_year = 0;
    std::string fixtures;
    std::string mode = "remote";  // remote | record | replay
    std::string runs_dir = "runs";
    std::size_t context_chars = 48000;
    bool strict = false;
};

void add_gateway_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--model", cfg.model_id, "Model identifier sent to the backend");
    cmd->add_option("--base-url", cfg.base_url, "Chat-completion endpoint base URL");
    cmd->add_option("--temperature", cfg.temperature, "Sampling temperature")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-tokens", cfg.max_tokens, "Completion token cap");
    cmd->add_option("--concurrency", cfg.concurrency, "Concurrent in-flight requests")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rpm", cfg.requests_per_minute, "Requests-per-minute budget")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--fixtures", cfg.fixtures, "Fixtures directory for record/replay");
    cmd->add_option("--mode", cfg.mode, "Backend mode: remote, record or replay")
        ->check(CLI::IsMember({"remote", "record", "replay"}));
    cmd->add_option("--runs-dir", cfg.runs_dir, "Directory for run records");
    cmd->add_option("--context-chars", cfg.context_chars,
                    "Prompt budget for concatenated documents");
    cmd->add_flag("--strict", cfg.strict, "Retry non-parsing completions once");
}

llm::Gateway make_gateway(const RunConfig& cfg) {
    if (cfg.mode == "replay") {
        if (cfg.fixtures.empty()) {
            throw Error("replay mode requires --fixtures");
        }
        return llm::Gateway(std::make_shared<llm::ReplayBackend>(cfg.fixtures));
    }
    llm::RemoteOptions options;
    options.base_url = cfg.base_url;
    options.max_concurrent = cfg.concurrency;
    options.requests_per_minute = cfg.requests_per_minute;
    auto remote = std::make_shared<llm::RemoteBackend>(options);
    if (cfg.mode == "record") {
        if (cfg.fixtures.empty()) {
            throw Error("record mode requires --fixtures");
        }
        return llm::Gateway(std::make_shared<llm::RecordBackend>(remote, cfg.fixtures));
    }
    return llm::Gateway(remote);
}

pipeline::PipelineOptions pipeline_options(const RunConfig& cfg) {
    pipeline::PipelineOptions opts;
    opts.model_id = cfg.model_id;
    opts.temperature = cfg.temperature;
    opts.max_tokens = cfg.max_tokens;
    opts.context_chars = cfg.context_chars;
    opts.strict_retry = cfg.strict;
    opts.doc_concurrency = static_cast<std::size_t>(cfg.concurrency);
    return opts;
}

std::vector<Sample> load_filtered_corpus(const RunConfig& cfg) {
    if (cfg.corpus.empty()) {
        throw Error("--corpus is required");
    }
    auto samples = load_corpus(cfg.corpus);
    if (cfg.min_year > 0) {
        std::erase_if(samples, [&](const Sample& s) { return s.year < cfg.min_year; });
    }
    return samples;
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg,
                                                                 const std::string& command) {
    return {
        {"command", command},
        {"corpus", cfg.corpus},
        {"model_id", cfg.model_id},
        {"mode", cfg.mode},
        {"temperature", std::to_string(cfg.temperature)},
        {"strategy", cfg.strategy},
        {"threshold", std::to_string(cfg.threshold)},
        {"stemming", cfg.stemming ? "true" : "false"},
        {"min_year", std::to_string(cfg.min_year)},
    };
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path);
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string("-");
}

// ---------------------------------------------------------------------------
// extract

int cmd_extract(const RunConfig& cfg, const std::string& out_path, const std::string& docs_scope) {
    const auto samples = load_filtered_corpus(cfg);
    auto gateway = make_gateway(cfg);
    const auto opts = pipeline_options(cfg);

    RunRecord record;
    record.run_id = new_run_id();
    record.started_at = iso8601_utc_now();
    record.config = config_snapshot(cfg, "extract");

    auto out = open_output(out_path);
    std::size_t failures = 0;
    std::size_t backend_failures = 0;
    for (const auto& sample : samples) {
        pipeline::StepRecorder rec;
        RunEntry entry;
        entry.paper_id = sample.paper_id;
        entry.strategy = "extract";
        std::vector<const SourceDocument*> docs;
        if (docs_scope == "sources" || docs_scope == "all") {
            for (const auto& d : sample.source_documents) docs.push_back(&d);
        }
        if (docs_scope == "meta" || docs_scope == "all") {
            docs.push_back(&sample.meta_review);
        }
        try {
            for (const auto* doc : docs) {
                const auto judgements =
                    pipeline::extract_complete_judgements(*doc, gateway, opts, &rec);
                for (const auto& j : judgements) {
                    OrderedJson obj;
                    obj["paper_id"] = sample.paper_id;
                    obj["doc_id"] = doc->doc_id;
                    obj["doc_type"] = doc_type_name(doc->doc_type);
                    const OrderedJson fields = judgement_to_json(j);
                    for (const auto& [k, v] : fields.items()) obj[k] = v;
                    out << obj.dump() << '\n';
                    entry.judgements.push_back(j);
                }
            }
        } catch (const BackendError& e) {
            entry.failed = true;
            entry.error = e.what();
            ++failures;
            ++backend_failures;
        } catch (const std::exception& e) {
            entry.failed = true;
            entry.error = e.what();
            ++failures;
        }
        entry.completions = std::move(rec.traces);
        entry.notes = std::move(rec.notes);
        record.entries.push_back(std::move(entry));
    }
    record.finished_at = iso8601_utc_now();
    const auto record_path = save_run(record, cfg.runs_dir);
    std::cout << "extracted judgements for " << samples.size() - failures << "/" << samples.size()
              << " samples -> " << out_path << "\nrun record: " << record_path.string() << "\n";
    if (failures == 0) return kExitOk;
    return failures == samples.size() && backend_failures > 0 ? kExitBackend : kExitPartial;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const RunConfig& cfg, const std::string& out_path) {
    const auto strategy = pipeline::parse_strategy(cfg.strategy);
    if (!strategy) {
        throw Error("unknown strategy: " + cfg.strategy);
    }
    const auto samples = load_filtered_corpus(cfg);
    auto gateway = make_gateway(cfg);
    const auto opts = pipeline_options(cfg);

    RunRecord record;
    record.run_id = new_run_id();
    record.started_at = iso8601_utc_now();
    record.config = config_snapshot(cfg, "generate");

    auto out = open_output(out_path);
    std::size_t failures = 0;
    std::size_t backend_failures = 0;
    for (const auto& sample : samples) {
        auto outcome = pipeline::generate_meta_review(sample, *strategy, gateway, opts);
        if (outcome.entry.failed) {
            ++failures;
            if (outcome.backend_failure) ++backend_failures;
            std::cerr << "sample " << sample.paper_id << " failed: " << outcome.entry.error
                      << "\n";
        } else {
            OrderedJson obj;
            obj["paper_id"] = sample.paper_id;
            obj["strategy"] = cfg.strategy;
            obj["text"] = outcome.text;
            out << obj.dump() << '\n';
        }
        record.entries.push_back(std::move(outcome.entry));
    }
    record.finished_at = iso8601_utc_now();
    const auto record_path = save_run(record, cfg.runs_dir);
    std::cout << "generated " << samples.size() - failures << "/" << samples.size()
              << " meta-reviews (" << cfg.strategy << ") -> " << out_path
              << "\nrun record: " << record_path.string() << "\n";
    if (failures == 0) return kExitOk;
    return failures == samples.size() && backend_failures > 0 ? kExitBackend : kExitPartial;
}

// ---------------------------------------------------------------------------
// evaluate

int cmd_evaluate(const RunConfig& cfg, const std::string& generated_path,
                 const std::string& out_path, const std::string& annotations_path,
                 bool prefer_annotations) {
    const auto samples = load_filtered_corpus(cfg);
    std::map<std::string, std::string> generated;
    {
        std::ifstream in(generated_path);
        if (!in) {
            throw IoError("cannot open for reading: " + generated_path);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            Json obj;
            try {
                obj = Json::parse(line);
            } catch (const Json::exception& e) {
                throw DecodeError(e.what(), line_no);
            }
            generated[obj.at("paper_id").get<std::string>()] = obj.at("text").get<std::string>();
        }
    }

    std::vector<pipeline::EvaluateInput> inputs;
    for (const auto& sample : samples) {
        auto it = generated.find(sample.paper_id);
        if (it == generated.end()) {
            throw Error("no generated text for sample " + sample.paper_id);
        }
        inputs.push_back({&sample, it->second});
    }

    std::vector<AnnotationSet> annotations;
    pipeline::EvaluateOptions eval_opts;
    eval_opts.tokenize.porter_stemming = cfg.stemming;
    if (!annotations_path.empty()) {
        annotations = load_annotations(annotations_path);
        link_annotations(annotations, samples);
        eval_opts.annotations = annotations;
        eval_opts.prefer_reference_annotations = prefer_annotations;
    }

    auto gateway = make_gateway(cfg);
    RunRecord record;
    record.run_id = new_run_id();
    record.started_at = iso8601_utc_now();
    record.config = config_snapshot(cfg, "evaluate");

    const auto table =
        pipeline::evaluate_run(inputs, gateway, pipeline_options(cfg), eval_opts, &record);
    record.finished_at = iso8601_utc_now();
    const auto record_path = save_run(record, cfg.runs_dir);

    if (!out_path.empty()) {
        auto out = open_output(out_path);
        for (const auto& row : table.rows) {
            OrderedJson obj;
            obj["type"] = "sample";
            obj["paper_id"] = row.paper_id;
            if (row.fusion_eval) {
                obj["fusion_eval"] = *row.fusion_eval;
            } else {
                obj["fusion_eval"] = nullptr;
            }
            obj["facet_eval"] = row.facet_eval;
            obj["rouge1_f1"] = row.rouge.r1.f1;
            obj["rouge2_f1"] = row.rouge.r2.f1;
            obj["rougel_f1"] = row.rouge.rl.f1;
            obj["excluded"] = row.excluded;
            if (!row.error.empty()) obj["error"] = row.error;
            out << obj.dump() << '\n';
        }
        OrderedJson summary;
        summary["type"] = "summary";
        if (table.fusion_mean) {
            summary["fusion_eval_mean"] = *table.fusion_mean;
        } else {
            summary["fusion_eval_mean"] = nullptr;
        }
        summary["facet_eval_mean"] = table.facet_mean;
        summary["rouge1_f1_mean"] = table.rouge1_mean;
        summary["rouge2_f1_mean"] = table.rouge2_mean;
        summary["rougel_f1_mean"] = table.rougel_mean;
        summary["excluded"] = table.excluded_count;
        summary["fusion_absent"] = table.fusion_absent_count;
        out << summary.dump() << '\n';
    }

    std::printf("%-12s %10s %10s %8s %8s %8s\n", "sample", "FusionEval", "FacetEval", "R-1",
                "R-2", "R-L");
    for (const auto& row : table.rows) {
        if (row.excluded) {
            std::printf("%-12s %10s %10s %8s %8s %8s  excluded: %s\n", row.paper_id.c_str(), "-",
                        "-", "-", "-", "-", row.error.c_str());
            continue;
        }
        std::printf("%-12s %10s %10s %8s %8s %8s\n", row.paper_id.c_str(),
                    fmt_opt(row.fusion_eval).c_str(), fmt(row.facet_eval).c_str(),
                    fmt(row.rouge.r1.f1).c_str(), fmt(row.rouge.r2.f1).c_str(),
                    fmt(row.rouge.rl.f1).c_str());
    }
    std::printf("%-12s %10s %10s %8s %8s %8s\n", "mean", fmt_opt(table.fusion_mean).c_str(),
                fmt(table.facet_mean).c_str(), fmt(table.rouge1_mean).c_str(),
                fmt(table.rouge2_mean).c_str(), fmt(table.rougel_mean).c_str());
    if (table.excluded_count > 0) {
        std::printf("excluded samples: %zu\n", table.excluded_count);
    }
    if (table.fusion_absent_count > 0) {
        std::printf("samples without a FusionEval score: %zu\n", table.fusion_absent_count);
    }
    std::cout << "run record: " << record_path.string() << "\n";
    if (table.excluded_count == 0) return kExitOk;
    std::size_t backend_failures = 0;
    for (const auto& row : table.rows) backend_failures += row.backend_failure ? 1 : 0;
    return table.excluded_count == table.rows.size() && backend_failures > 0 ? kExitBackend
                                                                             : kExitPartial;
}

// ---------------------------------------------------------------------------
// agreement

int cmd_agreement(const RunConfig& cfg, const std::string& annotations_a,
                  const std::string& annotations_b, const std::string& out_path, bool ordinal) {
    const auto samples = load_filtered_corpus(cfg);
    const auto sets_a = load_annotations(annotations_a);
    const auto sets_b = load_annotations(annotations_b);
    link_annotations(sets_a, samples);
    link_annotations(sets_b, samples);

    std::map<std::string, const SourceDocument*> docs;
    for (const auto& s : samples) {
        for (const auto& d : s.source_documents) docs.emplace(d.doc_id, &d);
        docs.emplace(s.meta_review.doc_id, &s.meta_review);
    }
    std::map<std::string, const AnnotationSet*> by_doc_a, by_doc_b;
    for (const auto& set : sets_a) by_doc_a[set.doc_id] = &set;
    for (const auto& set : sets_b) by_doc_b[set.doc_id] = &set;

    const rouge::TokenizeOptions tokenize{cfg.stemming};
    const auto metric = ordinal ? agreement::AlphaMetric::Ordinal : agreement::AlphaMetric::Nominal;

    std::ofstream out;
    if (!out_path.empty()) out = open_output(out_path);
    auto emit = [&](const OrderedJson& obj) {
        if (out.is_open()) out << obj.dump() << '\n';
    };

    std::printf("%-16s %-14s %10s %10s %8s\n", "doc_type", "component", "kappa", "alpha", "n");
    for (const auto doc_type :
         {DocType::MetaReview, DocType::OfficialReview, DocType::Discussion}) {
        // Character-level agreement over concatenated span indicator vectors.
        for (const auto kind : {SpanKind::Content, SpanKind::Sentiment}) {
            std::vector<int> chars_a, chars_b;
            std::vector<agreement::LabelPair> units;
            for (const auto& [doc_id, doc] : docs) {
                if (doc->doc_type != doc_type) continue;
                auto ia = by_doc_a.find(doc_id);
                auto ib = by_doc_b.find(doc_id);
                if (ia == by_doc_a.end() || ib == by_doc_b.end()) continue;
                const auto [va, vb] =
                    agreement::span_char_vectors(text::utf8_length(doc->text),
                                                 ia->second->spans_of(kind),
                                                 ib->second->spans_of(kind));
                for (std::size_t i = 0; i < va.size(); ++i) {
                    chars_a.push_back(va[i]);
                    chars_b.push_back(vb[i]);
                    units.push_back({static_cast<int>(va[i]), static_cast<int>(vb[i])});
                }
            }
            const std::string component =
                kind == SpanKind::Content ? "content_expression" : "sentiment_expression";
            OrderedJson obj;
            obj["type"] = "span_agreement";
            obj["doc_type"] = doc_type_name(doc_type);
            obj["component"] = component;
            try {
                const double kappa = agreement::cohens_kappa(chars_a, chars_b);
                const double alpha = agreement::krippendorff_alpha(units);
                std::printf("%-16s %-14s %10s %10s %8zu\n",
                            std::string(doc_type_name(doc_type)).c_str(), component.c_str(),
                            fmt(kappa).c_str(), fmt(alpha).c_str(), chars_a.size());
                obj["kappa"] = kappa;
                obj["alpha"] = alpha;
                obj["n_chars"] = chars_a.size();
            } catch (const Error&) {
                std::printf("%-16s %-14s %10s %10s %8zu\n",
                            std::string(doc_type_name(doc_type)).c_str(), component.c_str(), "-",
                            "-", chars_a.size());
                obj["kappa"] = nullptr;
                obj["alpha"] = nullptr;
                obj["n_chars"] = chars_a.size();
            }
            emit(obj);
        }

        // Component agreement over ROUGE-aligned judgements.
        std::vector<agreement::AlignedPair> pairs;
        for (const auto& [doc_id, doc] : docs) {
            if (doc->doc_type != doc_type) continue;
            auto ia = by_doc_a.find(doc_id);
            auto ib = by_doc_b.find(doc_id);
            if (ia == by_doc_a.end() || ib == by_doc_b.end()) continue;
            auto doc_pairs = agreement::align_judgements(
                ia->second->judgements, ib->second->judgements, cfg.threshold, tokenize);
            for (auto& p : doc_pairs) pairs.push_back(std::move(p));
        }
        const std::pair<agreement::JudgementComponent, const char*> components[] = {
            {agreement::JudgementComponent::Facet, "facet"},
            {agreement::JudgementComponent::Level, "level"},
            {agreement::JudgementComponent::Convincingness, "convincingness"},
            {agreement::JudgementComponent::Expresser, "expresser"},
        };
        for (const auto& [component, label] : components) {
            OrderedJson obj;
            obj["type"] = "component_agreement";
            obj["doc_type"] = doc_type_name(doc_type);
            obj["component"] = label;
            try {
                const auto stats = agreement::component_agreement(
                    pairs, component,
                    component == agreement::JudgementComponent::Level
                        ? metric
                        : agreement::AlphaMetric::Nominal);
                std::printf("%-16s %-14s %10s %10s %8zu\n",
                            std::string(doc_type_name(doc_type)).c_str(), label,
                            fmt(stats.kappa).c_str(), fmt(stats.alpha).c_str(), stats.n_units);
                obj["kappa"] = stats.kappa;
                obj["alpha"] = stats.alpha;
                obj["n_pairs"] = stats.n_units;
            } catch (const Error&) {
                std::printf("%-16s %-14s %10s %10s %8zu\n",
                            std::string(doc_type_name(doc_type)).c_str(), label, "-", "-",
                            pairs.size());
                obj["kappa"] = nullptr;
                obj["alpha"] = nullptr;
                obj["n_pairs"] = pairs.size();
            }
            emit(obj);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// analyze

int cmd_analyze(const RunConfig& cfg, const std::string& judgements_path,
                const std::string& out_path) {
    const auto samples = load_filtered_corpus(cfg);

    // Judgement file lines -> per (paper_id, doc_id) lists.
    std::map<std::pair<std::string, std::string>, std::vector<Judgement>> by_doc;
    {
        std::ifstream in(judgements_path);
        if (!in) {
            throw IoError("cannot open for reading: " + judgements_path);
        }
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            Json obj;
            try {
                obj = Json::parse(line);
            } catch (const Json::exception& e) {
                throw DecodeError(e.what(), line_no);
            }
            const auto paper_id = obj.at("paper_id").get<std::string>();
            const Judgement j = judgement_from_json(obj);
            by_doc[{paper_id, obj.at("doc_id").get<std::string>()}].push_back(j);
        }
    }

    std::ofstream out;
    if (!out_path.empty()) out = open_output(out_path);
    auto emit = [&](const OrderedJson& obj) {
        if (out.is_open()) out << obj.dump() << '\n';
    };

    // Facet frequency over annotated meta-reviews.
    std::vector<std::vector<Judgement>> meta_docs;
    for (const auto& s : samples) {
        auto it = by_doc.find({s.paper_id, s.meta_review.doc_id});
        meta_docs.push_back(it != by_doc.end() ? it->second : std::vector<Judgement>{});
    }
    std::printf("facet frequency over %zu meta-reviews\n", meta_docs.size());
    std::printf("%-14s %12s %12s\n", "facet", "%judgements", "%documents");
    const auto freq = metrics::facet_frequency(meta_docs);
    for (auto f : kAllFacets) {
        const auto& share = freq[facet_index(f)];
        std::printf("%-14s %12s %12s\n", std::string(facet_name(f)).c_str(),
                    fmt(share.judgement_share).c_str(), fmt(share.document_share).c_str());
        OrderedJson obj;
        obj["type"] = "facet_frequency";
        obj["facet"] = facet_name(f);
        obj["judgement_share"] = share.judgement_share;
        obj["document_share"] = share.document_share;
        emit(obj);
    }

    // Pairwise sentiment consistency among official reviews.
    std::vector<metrics::SampleReviews> consistency_input;
    for (const auto& s : samples) {
        metrics::SampleReviews sr;
        sr.paper_id = s.paper_id;
        for (const auto* doc : s.official_reviews()) {
            metrics::ReviewJudgements rj;
            rj.rating = doc->rating;
            auto it = by_doc.find({s.paper_id, doc->doc_id});
            if (it != by_doc.end()) rj.judgements = it->second;
            sr.reviews.push_back(std::move(rj));
        }
        consistency_input.push_back(std::move(sr));
    }
    const auto consistency = metrics::pairwise_review_consistency(consistency_input);
    const std::pair<const metrics::ConsistencyStratum*, const char*> strata[] = {
        {&consistency.with_conflicts, "with_conflicts"},
        {&consistency.without_conflicts, "without_conflicts"},
    };
    for (const auto& [stratum, label] : strata) {
        std::printf("\nsentiment consistency, %s (%zu pairs, pooled per pair)\n", label,
                    stratum->pair_count);
        if (stratum->pair_count == 0) {
            std::printf("  (no pairs in this stratum)\n");
        }
        for (auto f : kAllFacets) {
            const auto& stat = stratum->facet[facet_index(f)];
            OrderedJson obj;
            obj["type"] = "consistency";
            obj["stratum"] = label;
            obj["facet"] = facet_name(f);
            if (stat.n == 0) {
                if (stratum->pair_count > 0) {
                    std::printf("%-14s %12s %12s %8s\n", std::string(facet_name(f)).c_str(), "-",
                                "-", "0");
                }
                obj["mean"] = nullptr;
                obj["variance"] = nullptr;
            } else {
                std::printf("%-14s %12s %12s %8zu\n", std::string(facet_name(f)).c_str(),
                            fmt(stat.mean).c_str(), fmt(stat.variance).c_str(), stat.n);
                obj["mean"] = stat.mean;
                obj["variance"] = stat.variance;
            }
            obj["n"] = stat.n;
            emit(obj);
        }
    }
    if (consistency.skipped_pairs > 0) {
        std::printf("skipped pairs without ratings: %zu\n", consistency.skipped_pairs);
    }

    // Decision vs majority voting.
    std::vector<metrics::VotingSample> voting_input;
    for (const auto& s : samples) {
        voting_input.push_back({s.decision, s.ratings()});
    }
    const auto voting = metrics::voting_disagreement_rate(voting_input);
    std::printf("\nmajority-voting disagreement rate: %s (%zu samples, %zu skipped)\n",
                fmt(voting.disagreement_rate).c_str(), voting.counted, voting.skipped);
    OrderedJson obj;
    obj["type"] = "voting";
    obj["disagreement_rate"] = voting.disagreement_rate;
    obj["counted"] = voting.counted;
    obj["skipped"] = voting.skipped;
    emit(obj);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// ingest / report

int cmd_ingest(const RunConfig& cfg, const std::string& out_path) {
    const auto samples = load_filtered_corpus(cfg);
    std::size_t reviews = 0, discussions = 0, rated = 0, decided = 0;
    for (const auto& s : samples) {
        reviews += s.official_reviews().size();
        discussions += s.discussions().size();
        rated += s.ratings().size();
        decided += s.decision.has_value() ? 1 : 0;
    }
    std::printf("samples: %zu\nofficial reviews: %zu (%zu rated)\ndiscussions: %zu\n"
                "decisions present: %zu\n",
                samples.size(), reviews, rated, discussions, decided);
    if (!out_path.empty()) {
        save_corpus(samples, out_path);
        std::printf("normalized corpus -> %s\n", out_path.c_str());
    }
    return kExitOk;
}

int cmd_report(const std::string& in_path) {
    std::ifstream in(in_path);
    if (!in) {
        throw IoError("cannot open for reading: " + in_path);
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json obj;
        try {
            obj = Json::parse(line);
        } catch (const Json::exception& e) {
            throw DecodeError(e.what(), line_no);
        }
        const std::string type = obj.value("type", "");
        auto num = [&](const char* key) -> std::string {
            if (!obj.contains(key) || obj[key].is_null()) return "-";
            return fmt(obj[key].get<double>());
        };
        if (type == "sample") {
            std::printf("%-12s fusion=%s facet=%s r1=%s r2=%s rl=%s%s\n",
                        obj.value("paper_id", "?").c_str(), num("fusion_eval").c_str(),
                        num("facet_eval").c_str(), num("rouge1_f1").c_str(),
                        num("rouge2_f1").c_str(), num("rougel_f1").c_str(),
                        obj.value("excluded", false) ? " [excluded]" : "");
        } else if (type == "summary") {
            std::printf("mean         fusion=%s facet=%s r1=%s r2=%s rl=%s excluded=%lld\n",
                        num("fusion_eval_mean").c_str(), num("facet_eval_mean").c_str(),
                        num("rouge1_f1_mean").c_str(), num("rouge2_f1_mean").c_str(),
                        num("rougel_f1_mean").c_str(),
                        static_cast<long long>(obj.value("excluded", 0)));
        } else if (type == "span_agreement" || type == "component_agreement") {
            std::printf("%-16s %-20s kappa=%s alpha=%s\n", obj.value("doc_type", "?").c_str(),
                        obj.value("component", "?").c_str(), num("kappa").c_str(),
                        num("alpha").c_str());
        } else if (type == "facet_frequency") {
            std::printf("%-14s judgements=%s documents=%s\n", obj.value("facet", "?").c_str(),
                        num("judgement_share").c_str(), num("document_share").c_str());
        } else if (type == "consistency") {
            std::printf("%-18s %-14s mean=%s var=%s n=%lld\n",
                        obj.value("stratum", "?").c_str(), obj.value("facet", "?").c_str(),
                        num("mean").c_str(), num("variance").c_str(),
                        static_cast<long long>(obj.value("n", 0)));
        } else if (type == "voting") {
            std::printf("voting disagreement rate=%s counted=%lld skipped=%lld\n",
                        num("disagreement_rate").c_str(),
                        static_cast<long long>(obj.value("counted", 0)),
                        static_cast<long long>(obj.value("skipped", 0)));
        } else {
            std::printf("(unrecognized row type '%s' at line %zu)\n", type.c_str(), line_no);
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"meta-review sentiment consolidation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config")->configurable(false);

    RunConfig cfg;
    app.add_option("--corpus", cfg.corpus, "Corpus file (one JSON record per line)");
    app.add_option("--min-year", cfg.min_year, "Keep only samples from this year onward");
    app.add_option("--threshold", cfg.threshold, "Judgement alignment similarity threshold")
        ->check(CLI::PositiveNumber);
    app.add_flag("--stemming", cfg.stemming, "Porter-stem tokens before ROUGE scoring");
    add_gateway_options(&app, cfg);

    std::string out_path;
    std::string docs_scope = "all";
    std::string generated_path;
    std::string annotations_path;
    std::string annotations_a, annotations_b;
    std::string report_in;
    bool prefer_annotations = false;
    bool ordinal = false;

    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print its statistics");
    ingest->add_option("--out", out_path, "Write the normalized corpus here");

    auto* extract = app.add_subcommand("extract", "Extract judgements from corpus documents");
    extract->add_option("--out", out_path, "Judgement output file (JSONL)")->required();
    extract->add_option("--docs", docs_scope, "Documents to annotate")
        ->check(CLI::IsMember({"all", "sources", "meta"}));

    auto* generate = app.add_subcommand("generate", "Generate meta-reviews for every sample");
    generate->add_option("--out", out_path, "Generated meta-review file (JSONL)")->required();
    generate->add_option("--strategy", cfg.strategy,
                         "naive | llm-steps | consolidation-prompt | consolidation-pipeline");

    auto* evaluate = app.add_subcommand("evaluate", "Score generated meta-reviews");
    evaluate->add_option("--generated", generated_path, "Generated meta-review file")->required();
    evaluate->add_option("--out", out_path, "Machine-readable score report (JSONL)");
    evaluate->add_option("--annotations", annotations_path,
                         "Annotation file for reference judgements");
    evaluate->add_flag("--prefer-annotations", prefer_annotations,
                       "Use annotator judgements for the human meta-review when available");

    auto* agreement_cmd =
        app.add_subcommand("agreement", "Inter-annotator agreement between two annotation files");
    agreement_cmd->add_option("--annotations-a", annotations_a, "First annotator file")
        ->required();
    agreement_cmd->add_option("--annotations-b", annotations_b, "Second annotator file")
        ->required();
    agreement_cmd->add_option("--out", out_path, "Machine-readable report (JSONL)");
    agreement_cmd->add_flag("--ordinal", ordinal,
                            "Ordinal alpha for sentiment levels instead of nominal");

    auto* analyze = app.add_subcommand("analyze", "Facet frequency, consistency and voting");
    analyze->add_option("--judgements", generated_path, "Judgement file from 'extract'")
        ->required();
    analyze->add_option("--out", out_path, "Machine-readable report (JSONL)");

    auto* report = app.add_subcommand("report", "Render a machine-readable report");
    report->add_option("--in", report_in, "Report file (JSONL)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(cfg, out_path);
        if (extract->parsed()) return cmd_extract(cfg, out_path, docs_scope);
        if (generate->parsed()) return cmd_generate(cfg, out_path);
        if (evaluate->parsed()) {
            return cmd_evaluate(cfg, generated_path, out_path, annotations_path,
                                prefer_annotations);
        }
        if (agreement_cmd->parsed()) {
            return cmd_agreement(cfg, annotations_a, annotations_b, out_path, ordinal);
        }
        if (analyze->parsed()) return cmd_analyze(cfg, generated_path, out_path);
        if (report->parsed()) return cmd_report(report_in);
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
