#include "metarev/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "metarev/errors.hpp"
#include "metarev/serialize.hpp"
#include "metarev/text.hpp"

namespace metarev {

namespace {

std::string get_string(const Json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw Error(std::string("missing or non-string field: ") + key);
    }
    return obj[key].get<std::string>();
}

template <typename Enum>
Enum parse_or_throw(std::optional<Enum> (*parser)(std::string_view), const std::string& label,
                    const char* field) {
    auto v = parser(label);
    if (!v) {
        throw Error(std::string("unknown ") + field + ": " + label);
    }
    return *v;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open for reading: " + path.string());
    }
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    return out;
}

}  // namespace

OrderedJson judgement_to_json(const Judgement& j) {
    OrderedJson obj;
    obj["judgement_sentence"] = j.judgement_sentence;
    obj["content_expression"] = j.content_expression;
    obj["sentiment_expression"] = j.sentiment_expression;
    obj["facet"] = facet_name(j.facet);
    obj["level"] = level_name(j.level);
    obj["convincingness"] = convincingness_name(j.convincingness);
    obj["expresser"] = expresser_name(j.expresser);
    if (!j.doc_id.empty()) obj["doc_id"] = j.doc_id;
    obj["verbatim"] = j.verbatim;
    return obj;
}

Judgement judgement_from_json(const Json& obj) {
    Judgement j;
    j.judgement_sentence = obj.value("judgement_sentence", std::string{});
    j.content_expression = get_string(obj, "content_expression");
    j.sentiment_expression = get_string(obj, "sentiment_expression");
    j.facet = parse_or_throw(&parse_facet, get_string(obj, "facet"), "facet");
    j.level = parse_or_throw(&parse_sentiment_level, get_string(obj, "level"), "sentiment level");
    j.convincingness = parse_or_throw(&parse_convincingness, get_string(obj, "convincingness"),
                                      "convincingness level");
    j.expresser = parse_or_throw(&parse_expresser, get_string(obj, "expresser"), "expresser");
    j.doc_id = obj.value("doc_id", std::string{});
    j.verbatim = obj.value("verbatim", false);
    return j;
}

OrderedJson document_to_json(const SourceDocument& d) {
    OrderedJson obj;
    obj["doc_id"] = d.doc_id;
    obj["doc_type"] = doc_type_name(d.doc_type);
    obj["text"] = d.text;
    if (d.rating) obj["rating"] = *d.rating;
    if (d.author_role) obj["author_role"] = *d.author_role;
    return obj;
}

SourceDocument document_from_json(const Json& obj) {
    SourceDocument d;
    d.doc_id = obj.value("doc_id", std::string{});
    d.doc_type = parse_or_throw(&parse_doc_type, get_string(obj, "doc_type"), "doc_type");
    d.text = get_string(obj, "text");
    if (obj.contains("rating") && !obj["rating"].is_null()) {
        if (!obj["rating"].is_number_integer()) {
            throw Error("rating must be an integer");
        }
        d.rating = obj["rating"].get<int>();
    }
    if (obj.contains("author_role") && obj["author_role"].is_string()) {
        d.author_role = obj["author_role"].get<std::string>();
    }
    return d;
}

OrderedJson sample_to_json(const Sample& s) {
    OrderedJson obj;
    obj["paper_id"] = s.paper_id;
    obj["year"] = s.year;
    if (s.decision) obj["decision"] = decision_name(*s.decision);
    OrderedJson meta;
    if (!s.meta_review.doc_id.empty()) meta["doc_id"] = s.meta_review.doc_id;
    meta["text"] = s.meta_review.text;
    obj["meta_review"] = std::move(meta);
    obj["source_documents"] = OrderedJson::array();
    for (const auto& d : s.source_documents) {
        obj["source_documents"].push_back(document_to_json(d));
    }
    return obj;
}

Sample sample_from_json(const Json& obj) {
    Sample s;
    s.paper_id = get_string(obj, "paper_id");
    if (!obj.contains("year") || !obj["year"].is_number_integer()) {
        throw Error("missing or non-integer field: year");
    }
    s.year = obj["year"].get<int>();
    if (obj.contains("decision") && !obj["decision"].is_null()) {
        s.decision =
            parse_or_throw(&parse_decision, get_string(obj, "decision"), "decision");
    }
    if (!obj.contains("meta_review") || !obj["meta_review"].is_object()) {
        throw Error("missing meta_review object");
    }
    s.meta_review.doc_id = obj["meta_review"].value("doc_id", std::string{"meta_review"});
    s.meta_review.doc_type = DocType::MetaReview;
    s.meta_review.text = get_string(obj["meta_review"], "text");
    if (!obj.contains("source_documents") || !obj["source_documents"].is_array()) {
        throw Error("missing source_documents array");
    }
    for (const auto& d : obj["source_documents"]) {
        s.source_documents.push_back(document_from_json(d));
    }
    return s;
}

std::vector<Sample> load_corpus(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::vector<Sample> samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        Json obj;
        try {
            obj = Json::parse(line);
        } catch (const Json::exception& e) {
            throw DecodeError(e.what(), line_no);
        }
        Sample s;
        try {
            s = sample_from_json(obj);
        } catch (const Error& e) {
            throw DecodeError(std::string("record ") + std::to_string(samples.size()) + ": " +
                                  e.what(),
                              line_no);
        }
        auto violations = check_sample(s);
        if (!violations.empty()) {
            for (auto& v : violations) {
                v.path = "record[" + std::to_string(samples.size()) + "]." + v.path;
            }
            throw ValidationError(std::move(violations));
        }
        samples.push_back(std::move(s));
    }
    return samples;
}

void save_corpus(std::span<const Sample> samples, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    for (const auto& s : samples) {
        out << sample_to_json(s).dump() << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::vector<TextSpan> AnnotationSet::spans_of(SpanKind kind) const {
    std::vector<TextSpan> out;
    for (const auto& s : spans) {
        if (s.kind == kind) out.push_back(s);
    }
    return out;
}

std::vector<AnnotationSet> load_annotations(const std::filesystem::path& path) {
    auto in = open_for_read(path);
    std::vector<AnnotationSet> sets;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        Json obj;
        try {
            obj = Json::parse(line);
        } catch (const Json::exception& e) {
            throw DecodeError(e.what(), line_no);
        }
        try {
            AnnotationSet set;
            set.annotator_id = get_string(obj, "annotator_id");
            set.doc_id = get_string(obj, "doc_id");
            if (obj.contains("spans")) {
                for (const auto& sp : obj["spans"]) {
                    TextSpan span;
                    span.kind = parse_or_throw(&parse_span_kind, get_string(sp, "kind"),
                                               "span kind");
                    span.start = sp.at("start").get<std::size_t>();
                    span.end = sp.at("end").get<std::size_t>();
                    if (span.start >= span.end) {
                        throw SpanError("span [" + std::to_string(span.start) + ", " +
                                        std::to_string(span.end) + ") is empty or inverted");
                    }
                    set.spans.push_back(span);
                }
            }
            if (obj.contains("judgements")) {
                for (const auto& jj : obj["judgements"]) {
                    Judgement j = judgement_from_json(jj);
                    if (j.doc_id.empty()) j.doc_id = set.doc_id;
                    auto violations = check_judgement(j, "judgement");
                    if (!violations.empty()) {
                        throw ValidationError(std::move(violations));
                    }
                    set.judgements.push_back(std::move(j));
                }
            }
            sets.push_back(std::move(set));
        } catch (const SpanError&) {
            throw;
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& e) {
            throw DecodeError(e.what(), line_no);
        } catch (const Json::exception& e) {
            throw DecodeError(e.what(), line_no);
        }
    }
    return sets;
}

void link_annotations(std::span<const AnnotationSet> sets, std::span<const Sample> samples) {
    std::unordered_map<std::string, const SourceDocument*> docs;
    for (const auto& s : samples) {
        for (const auto& d : s.source_documents) {
            docs.emplace(d.doc_id, &d);
        }
        docs.emplace(s.meta_review.doc_id, &s.meta_review);
    }
    for (const auto& set : sets) {
        auto it = docs.find(set.doc_id);
        if (it == docs.end()) {
            throw DanglingDocRef(set.doc_id);
        }
        const std::string& doc_text = it->second->text;
        const std::size_t doc_len = text::utf8_length(doc_text);
        for (const auto& span : set.spans) {
            if (span.end > doc_len) {
                throw SpanError("span [" + std::to_string(span.start) + ", " +
                                std::to_string(span.end) + ") exceeds document " + set.doc_id +
                                " of length " + std::to_string(doc_len));
            }
        }
        std::vector<Violation> violations;
        for (std::size_t i = 0; i < set.judgements.size(); ++i) {
            const auto& j = set.judgements[i];
            if (!j.verbatim) continue;
            auto covered = [&](SpanKind kind, const std::string& expression) {
                for (const auto& span : set.spans) {
                    if (span.kind != kind) continue;
                    if (text::utf8_substr(doc_text, span.start, span.end) == expression) {
                        return true;
                    }
                }
                return false;
            };
            const std::string path = "judgements[" + std::to_string(i) + "]";
            if (!covered(SpanKind::Content, j.content_expression)) {
                violations.push_back(
                    {path + ".content_expression", "no content span covers the expression"});
            }
            if (!covered(SpanKind::Sentiment, j.sentiment_expression)) {
                violations.push_back(
                    {path + ".sentiment_expression", "no sentiment span covers the expression"});
            }
        }
        if (!violations.empty()) {
            throw ValidationError(std::move(violations));
        }
    }
}

void save_annotations(std::span<const AnnotationSet> sets, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    for (const auto& set : sets) {
        OrderedJson obj;
        obj["annotator_id"] = set.annotator_id;
        obj["doc_id"] = set.doc_id;
        obj["spans"] = OrderedJson::array();
        for (const auto& span : set.spans) {
            OrderedJson sp;
            sp["kind"] = span_kind_name(span.kind);
            sp["start"] = span.start;
            sp["end"] = span.end;
            obj["spans"].push_back(std::move(sp));
        }
        obj["judgements"] = OrderedJson::array();
        for (const auto& j : set.judgements) {
            obj["judgements"].push_back(judgement_to_json(j));
        }
        out << obj.dump() << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

}  // namespace metarev
