#pragma once

// JSON (de)serialization for the domain types. Field names here are the
// on-disk contract for corpus, annotation, judgement and report files.

#include <json.hpp>

#include "metarev/domain.hpp"

namespace metarev {

using Json = nlohmann::json;
// Preserves insertion order so serialized files are byte-stable.
using OrderedJson = nlohmann::ordered_json;

OrderedJson judgement_to_json(const Judgement& j);
Judgement judgement_from_json(const Json& obj);

OrderedJson document_to_json(const SourceDocument& d);
SourceDocument document_from_json(const Json& obj);

OrderedJson sample_to_json(const Sample& s);
Sample sample_from_json(const Json& obj);

}  // namespace metarev
