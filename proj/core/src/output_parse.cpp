#include "metarev/output_parse.hpp"

#include <algorithm>

#include <json.hpp>

#include "metarev/text.hpp"

namespace metarev::llm {

namespace {

using Json = nlohmann::json;

/// Tries to parse the JSON object embedded in one line: either the whole
/// trimmed line or the first '{' .. last '}' window.
std::optional<Json> object_in_line(std::string_view line) {
    const std::string_view trimmed = text::trim(line);
    if (trimmed.empty()) return std::nullopt;
    const auto open = trimmed.find('{');
    const auto close = trimmed.rfind('}');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        return std::nullopt;
    }
    const std::string_view window = trimmed.substr(open, close - open + 1);
    Json obj = Json::parse(window, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) return std::nullopt;
    return obj;
}

bool is_fence(std::string_view line) {
    return text::trim(line).substr(0, 3) == "```";
}

std::vector<std::string_view> split_lines(std::string_view raw) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        auto nl = raw.find('\n', pos);
        if (nl == std::string_view::npos) {
            lines.push_back(raw.substr(pos));
            break;
        }
        lines.push_back(raw.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return lines;
}

std::optional<std::string> string_field(const Json& obj, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        auto it = obj.find(key);
        if (it != obj.end() && it->is_string()) {
            return it->get<std::string>();
        }
    }
    return std::nullopt;
}

}  // namespace

ExpressionParse parse_judgement_lines(std::string_view raw) {
    ExpressionParse out;
    const auto lines = split_lines(raw);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (text::trim(line).empty() || is_fence(line)) continue;
        auto obj = object_in_line(line);
        if (!obj) {
            out.diagnostics.push_back({i + 1, "not a JSON object, skipped"});
            continue;
        }
        auto sentence = string_field(*obj, {"judgement_sentence"});
        auto content = string_field(*obj, {"content_expression"});
        auto sentiment = string_field(*obj, {"sentiment_expression"});
        if (!sentence || !content || !sentiment) {
            out.diagnostics.push_back({i + 1, "missing required string field, skipped"});
            continue;
        }
        if (content->empty() || sentiment->empty()) {
            out.diagnostics.push_back({i + 1, "empty expression, skipped"});
            continue;
        }
        out.records.push_back({std::move(*sentence), std::move(*content), std::move(*sentiment)});
    }
    if (out.records.empty() && !text::trim(raw).empty()) {
        out.all_lines_failed = true;
        out.diagnostics.push_back({0, "no judgement lines parsed from non-empty completion"});
    }
    return out;
}

ComponentParse parse_component_lines(std::string_view raw,
                                     std::span<const ExpressionRecord> inputs) {
    ComponentParse out;
    out.assigned.resize(inputs.size());

    struct Candidate {
        ComponentRecord record;
        std::size_t line_no;
    };
    std::vector<Candidate> candidates;

    const auto lines = split_lines(raw);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = lines[i];
        if (text::trim(line).empty() || is_fence(line)) continue;
        auto obj = object_in_line(line);
        if (!obj) continue;
        ++out.lines_parsed;

        auto content = string_field(*obj, {"content_expression", "Content Expression"});
        auto sentiment = string_field(*obj, {"sentiment_expression", "Sentiment Expression"});
        auto facet_label = string_field(*obj, {"facet", "criteria_facet", "Criteria Facet"});
        auto level_label =
            string_field(*obj, {"level", "sentiment_level", "sentiment", "Sentiment Level",
                                "sentiment_polarity"});
        auto conv_label = string_field(
            *obj, {"convincingness", "convincingness_level", "Convincingness Level"});
        auto expresser_label =
            string_field(*obj, {"expresser", "sentiment_expresser", "Expresser"});

        auto fail = [&](const std::string& why) {
            out.diagnostics.push_back({i + 1, why});
        };
        if (!facet_label || !level_label || !conv_label || !expresser_label) {
            fail("missing component field, line dropped");
            continue;
        }
        const auto facet = parse_facet(*facet_label);
        if (!facet) {
            fail("unknown facet label '" + *facet_label + "', line dropped");
            continue;
        }
        const auto level = parse_sentiment_level(*level_label);
        if (!level) {
            fail("unknown sentiment level '" + *level_label + "', line dropped");
            continue;
        }
        const auto conv = parse_convincingness(*conv_label);
        if (!conv) {
            fail("unknown convincingness '" + *conv_label + "', line dropped");
            continue;
        }
        const auto expresser = parse_expresser(*expresser_label);
        if (!expresser) {
            fail("unknown expresser '" + *expresser_label + "', line dropped");
            continue;
        }
        if (*conv == ConvincingnessLevel::NotApplicable && *expresser != Expresser::Others) {
            fail("'Not applicable' convincingness with Self expresser, line dropped");
            continue;
        }
        ComponentRecord rec;
        rec.content_expression = content.value_or("");
        rec.sentiment_expression = sentiment.value_or("");
        rec.facet = *facet;
        rec.level = *level;
        rec.convincingness = *conv;
        rec.expresser = *expresser;
        candidates.push_back({std::move(rec), i + 1});
    }

    if (out.lines_parsed != inputs.size()) {
        out.count_mismatch = true;
        out.diagnostics.push_back(
            {0, "expected " + std::to_string(inputs.size()) + " component lines, parsed " +
                    std::to_string(out.lines_parsed)});
    }

    // First pass: exact content-expression match against unassigned inputs.
    std::vector<bool> candidate_used(candidates.size(), false);
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        const auto& cand = candidates[ci];
        if (cand.record.content_expression.empty()) continue;
        for (std::size_t ii = 0; ii < inputs.size(); ++ii) {
            if (out.assigned[ii]) continue;
            if (inputs[ii].content_expression == cand.record.content_expression) {
                out.assigned[ii] = cand.record;
                candidate_used[ci] = true;
                break;
            }
        }
    }
    // Second pass: remaining candidates to remaining inputs, in order.
    std::size_t next_input = 0;
    for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
        if (candidate_used[ci]) continue;
        while (next_input < inputs.size() && out.assigned[next_input]) ++next_input;
        if (next_input >= inputs.size()) break;
        out.assigned[next_input] = candidates[ci].record;
    }
    return out;
}

std::optional<LevelReply> parse_level_reply(std::string_view raw) {
    for (const auto line : split_lines(raw)) {
        auto obj = object_in_line(line);
        if (!obj) continue;
        auto level_label = string_field(*obj, {"Sentiment Level", "sentiment_level", "level"});
        if (!level_label) continue;
        auto level = parse_sentiment_level(*level_label);
        if (!level) continue;
        LevelReply reply;
        reply.level = *level;
        reply.content_expression =
            string_field(*obj, {"Content Expression", "content_expression"}).value_or("");
        return reply;
    }
    return std::nullopt;
}

}  // namespace metarev::llm
