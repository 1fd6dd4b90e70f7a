#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace madios {

using SentenceId = std::uint32_t;

struct Sentence {
    SentenceId id = 0;
    std::vector<std::string> tokens;
};

struct LoadOptions {
    // Keep only sentences with at most this many tokens. Unset keeps all.
    std::optional<std::size_t> max_length;
};

class Corpus {
public:
    Corpus() = default;

    // Builds a corpus from raw lines: blank lines (after tokenizing) are
    // skipped, the rest numbered from 0. Throws EmptyCorpusError if nothing
    // survives.
    static Corpus from_lines(const std::vector<std::string>& lines, const LoadOptions& options = {});
    static Corpus from_stream(std::istream& in, const LoadOptions& options = {});

    const std::vector<Sentence>& sentences() const { return sentences_; }
    const std::map<std::string, std::size_t>& vocabulary() const { return vocabulary_; }
    std::size_t size() const { return sentences_.size(); }
    std::size_t token_count() const { return token_count_; }

    const Sentence* find(SentenceId id) const;
    // Ids dropped by the max_length filter.
    const std::set<SentenceId>& filtered_ids() const { return filtered_; }

private:
    std::vector<Sentence> sentences_;
    std::map<std::string, std::size_t> vocabulary_;
    std::set<SentenceId> filtered_;
    std::size_t token_count_ = 0;
};

// Whitespace split, lowercase, strip leading/trailing .,!?;: from each token.
std::vector<std::string> tokenize(std::string_view line);

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

enum class Role : std::uint8_t { Agent, Patient, Relation, Other };

std::string_view role_name(Role role);

// Accepts the canonical names (Agent, Patient, Relation, Other) and the
// PropBank tags they stand for: arg0, arg1, rel, arg2..arg5, argm[-xxx].
// Case-insensitive. Throws ParseError on anything else.
Role parse_role_tag(std::string_view tag);

struct RoleSpan {
    std::size_t start = 0;  // inclusive token index
    std::size_t end = 0;    // exclusive
    Role role = Role::Other;
};

struct RoleAnnotation {
    SentenceId sentence_id = 0;
    std::vector<RoleSpan> spans;  // sorted by start, non-overlapping
};

// Stand-off format: `sid<TAB>start<TAB>end<TAB>role` per line, `#` comments.
// Spans for sentences removed by the corpus length filter are dropped.
std::vector<RoleAnnotation> parse_annotations(std::istream& in, const Corpus& corpus);
std::vector<RoleAnnotation> load_annotations(const std::filesystem::path& path, const Corpus& corpus);

}  // namespace madios
