#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "metarev/domain.hpp"

namespace metarev {

/// One prompt/completion exchange, as it went over the wire.
struct CompletionTrace {
    std::string tag;          // pipeline step label
    std::string template_id;  // prompt template name
    std::string prompt;
    std::string completion;

    bool operator==(const CompletionTrace&) const = default;
};

/// Everything that happened for one sample during a run.
struct RunEntry {
    std::string paper_id;
    std::string strategy;
    std::vector<CompletionTrace> completions;
    std::vector<Judgement> judgements;
    std::string generated_text;
    std::vector<std::pair<std::string, double>> scores;
    std::vector<std::string> notes;
    bool failed = false;
    std::string error;

    std::size_t completion_count() const { return completions.size(); }

    bool operator==(const RunEntry&) const = default;
};

/// Append-only provenance of one pipeline execution. Entries are written
/// once and never mutated afterwards.
struct RunRecord {
    std::string run_id;
    std::vector<std::pair<std::string, std::string>> config;  // snapshot, ordered
    std::vector<RunEntry> entries;
    std::string started_at;   // ISO-8601 UTC
    std::string finished_at;

    bool operator==(const RunRecord&) const = default;
};

/// Fresh identifier: UTC timestamp plus a process-local counter, so two
/// saves in the same second still differ.
std::string new_run_id();

std::string iso8601_utc_now();

/// Writes the record as runs_dir/<run_id>.json and returns that path.
std::filesystem::path save_run(const RunRecord& record, const std::filesystem::path& runs_dir);

RunRecord load_run(const std::filesystem::path& file);

}  // namespace metarev
