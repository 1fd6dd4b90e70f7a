#include "madios/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "madios/error.hpp"

namespace madios {

namespace {

bool is_edge_punct(char c) {
    switch (c) {
        case '.': case ',': case '!': case '?': case ';': case ':': return true;
        default: return false;
    }
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::size_t parse_index(std::string_view field, std::size_t line) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError("expected a non-negative integer, got '" + std::string(field) + "'", line);
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
    }
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        std::size_t a = i, b = j;
        while (a < b && is_edge_punct(line[a])) ++a;
        while (b > a && is_edge_punct(line[b - 1])) --b;
        if (a < b) tokens.push_back(lower(line.substr(a, b - a)));
        i = j;
    }
    return tokens;
}

Corpus Corpus::from_lines(const std::vector<std::string>& lines, const LoadOptions& options) {
    Corpus corpus;
    SentenceId next = 0;
    for (const auto& line : lines) {
        auto tokens = tokenize(line);
        if (tokens.empty()) continue;
        SentenceId id = next++;
        if (options.max_length && tokens.size() > *options.max_length) {
            corpus.filtered_.insert(id);
            continue;
        }
        for (const auto& t : tokens) ++corpus.vocabulary_[t];
        corpus.token_count_ += tokens.size();
        corpus.sentences_.push_back({id, std::move(tokens)});
    }
    if (corpus.sentences_.empty()) throw EmptyCorpusError("corpus contains no sentences");
    return corpus;
}

Corpus Corpus::from_stream(std::istream& in, const LoadOptions& options) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(std::move(line));
    return from_lines(lines, options);
}

const Sentence* Corpus::find(SentenceId id) const {
    auto it = std::lower_bound(sentences_.begin(), sentences_.end(), id,
                               [](const Sentence& s, SentenceId v) { return s.id < v; });
    return it != sentences_.end() && it->id == id ? &*it : nullptr;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read corpus file " + path.string());
    return Corpus::from_stream(in, options);
}

std::string_view role_name(Role role) {
    switch (role) {
        case Role::Agent: return "Agent";
        case Role::Patient: return "Patient";
        case Role::Relation: return "Relation";
        case Role::Other: return "Other";
    }
    return "Other";
}

Role parse_role_tag(std::string_view tag) {
    auto t = lower(tag);
    if (t == "agent" || t == "arg0") return Role::Agent;
    if (t == "patient" || t == "arg1") return Role::Patient;
    if (t == "relation" || t == "rel") return Role::Relation;
    if (t == "other" || t == "argm" || t.rfind("argm-", 0) == 0) return Role::Other;
    if (t.size() == 4 && t.rfind("arg", 0) == 0 && t[3] >= '2' && t[3] <= '5') return Role::Other;
    throw ParseError("unknown role tag '" + std::string(tag) + "'");
}

std::vector<RoleAnnotation> parse_annotations(std::istream& in, const Corpus& corpus) {
    std::map<SentenceId, std::vector<RoleSpan>> by_sentence;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split_tabs(line);
        if (fields.size() != 4) throw ParseError("expected 4 tab-separated fields", lineno);
        auto sid = static_cast<SentenceId>(parse_index(fields[0], lineno));
        RoleSpan span;
        span.start = parse_index(fields[1], lineno);
        span.end = parse_index(fields[2], lineno);
        try {
            span.role = parse_role_tag(fields[3]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (corpus.filtered_ids().count(sid)) continue;
        const Sentence* sentence = corpus.find(sid);
        if (!sentence) throw ValidationError("annotation references unknown sentence " + std::to_string(sid));
        if (span.start >= span.end || span.end > sentence->tokens.size()) {
            throw ValidationError("span (" + std::to_string(span.start) + "," + std::to_string(span.end) +
                                  ") out of bounds for sentence " + std::to_string(sid) + " of length " +
                                  std::to_string(sentence->tokens.size()));
        }
        by_sentence[sid].push_back(span);
    }

    std::vector<RoleAnnotation> out;
    out.reserve(by_sentence.size());
    for (auto& [sid, spans] : by_sentence) {
        std::sort(spans.begin(), spans.end(), [](const RoleSpan& a, const RoleSpan& b) { return a.start < b.start; });
        for (std::size_t i = 1; i < spans.size(); ++i) {
            if (spans[i].start < spans[i - 1].end)
                throw ValidationError("overlapping role spans in sentence " + std::to_string(sid));
        }
        out.push_back({sid, std::move(spans)});
    }
    return out;
}

std::vector<RoleAnnotation> load_annotations(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read annotation file " + path.string());
    return parse_annotations(in, corpus);
}

}  // namespace madios
