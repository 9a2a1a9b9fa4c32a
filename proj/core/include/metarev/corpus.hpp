#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "metarev/domain.hpp"

namespace metarev {

/// Loads a JSONL corpus: one self-contained record per line. Every record
/// is validated; order is preserved. Throws DecodeError naming the failing
/// line or ValidationError naming the record index.
std::vector<Sample> load_corpus(const std::filesystem::path& path);

/// Writes samples back out, one canonical JSON record per line. Loading
/// the result yields structurally equal samples.
void save_corpus(std::span<const Sample> samples, const std::filesystem::path& path);

/// One annotator's work on one document.
struct AnnotationSet {
    std::string annotator_id;
    std::string doc_id;
    std::vector<Judgement> judgements;
    std::vector<TextSpan> spans;

    std::vector<TextSpan> spans_of(SpanKind kind) const;

    bool operator==(const AnnotationSet&) const = default;
};

/// Loads a JSONL annotation file. Local checks only (span start < end,
/// label sets, judgement invariants); use link_annotations to verify
/// against document text.
std::vector<AnnotationSet> load_annotations(const std::filesystem::path& path);

/// Verifies each annotation set against the corpus: the referenced document
/// exists (DanglingDocRef), spans fit its length in Unicode scalar values
/// (SpanError), and each verbatim judgement's expressions are covered by a
/// span of the matching kind (ValidationError).
void link_annotations(std::span<const AnnotationSet> sets, std::span<const Sample> samples);

void save_annotations(std::span<const AnnotationSet> sets, const std::filesystem::path& path);

}  // namespace metarev
