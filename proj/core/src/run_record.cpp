#include "metarev/run_record.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "metarev/errors.hpp"
#include "metarev/serialize.hpp"

namespace metarev {

namespace {

std::string format_utc(std::time_t t, const char* fmt) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, fmt, &tm);
    return buf;
}

OrderedJson trace_to_json(const CompletionTrace& t) {
    OrderedJson obj;
    obj["tag"] = t.tag;
    obj["template_id"] = t.template_id;
    obj["prompt"] = t.prompt;
    obj["completion"] = t.completion;
    return obj;
}

CompletionTrace trace_from_json(const Json& obj) {
    CompletionTrace t;
    t.tag = obj.value("tag", std::string{});
    t.template_id = obj.value("template_id", std::string{});
    t.prompt = obj.value("prompt", std::string{});
    t.completion = obj.value("completion", std::string{});
    return t;
}

}  // namespace

std::string iso8601_utc_now() {
    const auto now = std::chrono::system_clock::now();
    return format_utc(std::chrono::system_clock::to_time_t(now), "%Y-%m-%dT%H:%M:%SZ");
}

std::string new_run_id() {
    static std::atomic<unsigned> counter{0};
    const auto now = std::chrono::system_clock::now();
    const std::string stamp =
        format_utc(std::chrono::system_clock::to_time_t(now), "%Y%m%dT%H%M%S");
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "%03u", counter.fetch_add(1) % 1000);
    return "run-" + stamp + "-" + suffix;
}

std::filesystem::path save_run(const RunRecord& record, const std::filesystem::path& runs_dir) {
    std::error_code ec;
    std::filesystem::create_directories(runs_dir, ec);
    OrderedJson obj;
    obj["run_id"] = record.run_id;
    obj["started_at"] = record.started_at;
    obj["finished_at"] = record.finished_at;
    OrderedJson config;
    for (const auto& [k, v] : record.config) config[k] = v;
    obj["config"] = std::move(config);
    obj["entries"] = OrderedJson::array();
    for (const auto& e : record.entries) {
        OrderedJson entry;
        entry["paper_id"] = e.paper_id;
        entry["strategy"] = e.strategy;
        entry["completions"] = OrderedJson::array();
        for (const auto& t : e.completions) entry["completions"].push_back(trace_to_json(t));
        entry["judgements"] = OrderedJson::array();
        for (const auto& j : e.judgements) entry["judgements"].push_back(judgement_to_json(j));
        entry["generated_text"] = e.generated_text;
        OrderedJson scores;
        for (const auto& [k, v] : e.scores) scores[k] = v;
        entry["scores"] = std::move(scores);
        entry["notes"] = e.notes;
        entry["failed"] = e.failed;
        entry["error"] = e.error;
        obj["entries"].push_back(std::move(entry));
    }

    const auto path = runs_dir / (record.run_id + ".json");
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << obj.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
    return path;
}

RunRecord load_run(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw IoError("cannot open for reading: " + file.string());
    }
    OrderedJson obj;
    try {
        obj = OrderedJson::parse(in);
    } catch (const Json::exception& e) {
        throw DecodeError(e.what(), 0);
    }
    RunRecord record;
    record.run_id = obj.value("run_id", std::string{});
    record.started_at = obj.value("started_at", std::string{});
    record.finished_at = obj.value("finished_at", std::string{});
    if (obj.contains("config")) {
        for (const auto& [k, v] : obj["config"].items()) {
            record.config.emplace_back(k, v.get<std::string>());
        }
    }
    if (obj.contains("entries")) {
        for (const auto& ej : obj["entries"]) {
            RunEntry e;
            e.paper_id = ej.value("paper_id", std::string{});
            e.strategy = ej.value("strategy", std::string{});
            if (ej.contains("completions")) {
                for (const auto& t : ej["completions"]) e.completions.push_back(trace_from_json(t));
            }
            if (ej.contains("judgements")) {
                for (const auto& j : ej["judgements"]) e.judgements.push_back(judgement_from_json(j));
            }
            e.generated_text = ej.value("generated_text", std::string{});
            if (ej.contains("scores")) {
                for (const auto& [k, v] : ej["scores"].items()) {
                    e.scores.emplace_back(k, v.get<double>());
                }
            }
            if (ej.contains("notes")) {
                for (const auto& n : ej["notes"]) e.notes.push_back(n.get<std::string>());
            }
            e.failed = ej.value("failed", false);
            e.error = ej.value("error", std::string{});
            record.entries.push_back(std::move(e));
        }
    }
    return record;
}

}  // namespace metarev
