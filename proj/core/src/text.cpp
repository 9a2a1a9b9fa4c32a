#include "metarev/text.hpp"

#include <cctype>

namespace metarev::text {

namespace {

bool is_sep(unsigned char c) {
    return std::isspace(c) != 0 || c == '_' || c == '-';
}

bool is_utf8_continuation(unsigned char c) {
    return (c & 0xC0) == 0x80;
}

}  // namespace

std::string_view trim(std::string_view s) {
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    std::size_t e = s.size();
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string normalize_label(std::string_view s) {
    s = trim(s);
    std::string out;
    out.reserve(s.size());
    bool pending_sep = false;
    for (unsigned char c : s) {
        if (is_sep(c)) {
            pending_sep = !out.empty();
            continue;
        }
        if (pending_sep) {
            out.push_back(' ');
            pending_sep = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if (!is_utf8_continuation(c)) ++n;
    }
    return n;
}

std::size_t utf8_byte_offset(std::string_view s, std::size_t cp_index) {
    std::size_t seen = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_utf8_continuation(static_cast<unsigned char>(s[i]))) {
            if (seen == cp_index) return i;
            ++seen;
        }
    }
    return s.size();
}

std::string utf8_substr(std::string_view s, std::size_t cp_start, std::size_t cp_end) {
    if (cp_end <= cp_start) return {};
    const std::size_t b = utf8_byte_offset(s, cp_start);
    const std::size_t e = utf8_byte_offset(s, cp_end);
    return std::string(s.substr(b, e - b));
}

}  // namespace metarev::text
