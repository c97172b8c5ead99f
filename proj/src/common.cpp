#include "narrlens/common.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace narrlens {

std::string to_string(Domain d) {
    switch (d) {
        case Domain::CC: return "CC";
        case Domain::URW: return "URW";
        case Domain::Unknown: return "unknown";
    }
    return "unknown";
}

std::string to_string(Language l) {
    switch (l) {
        case Language::BG: return "BG";
        case Language::EN: return "EN";
        case Language::HI: return "HI";
        case Language::PT: return "PT";
        case Language::RU: return "RU";
    }
    return "EN";
}

std::string to_string(LabelLevel l) {
    return l == LabelLevel::Main ? "main" : "sub";
}

Domain parse_domain(std::string_view s) {
    if (s == "CC") return Domain::CC;
    if (s == "URW") return Domain::URW;
    if (s == "unknown") return Domain::Unknown;
    throw Error("unknown domain '" + std::string(s) + "'");
}

bool try_parse_language(std::string_view s, Language& out) {
    if (s == "BG") { out = Language::BG; return true; }
    if (s == "EN") { out = Language::EN; return true; }
    if (s == "HI") { out = Language::HI; return true; }
    if (s == "PT") { out = Language::PT; return true; }
    if (s == "RU") { out = Language::RU; return true; }
    return false;
}

Language parse_language(std::string_view s) {
    Language l;
    if (!try_parse_language(s, l)) {
        throw Error("unknown language '" + std::string(s) + "'");
    }
    return l;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> whitespace_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    return fnv1a64(bytes, 14695981039346656037ULL);
}

std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write file: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        throw Error("write failed: " + path.string());
    }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::string content = read_text_file(path);
    std::vector<std::string> lines;
    std::string current;
    for (char c : content) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) {
        if (current.back() == '\r') current.pop_back();
        lines.push_back(current);
    }
    return lines;
}

} // namespace narrlens
