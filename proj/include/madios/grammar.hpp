#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "madios/corpus.hpp"
#include "madios/graph.hpp"
#include "madios/inventory.hpp"
#include "madios/symbol.hpp"

namespace madios {

enum class RuleKind { Sequence, Alternatives };

struct Rule {
    Symbol head;
    RuleKind kind = RuleKind::Sequence;
    std::vector<Symbol> body;
};

// A closed set of CFG-like rules: ROOT -> S heads, one S rule per distinct
// reduced sentence, pattern rules (sequences) and class rules (alternatives).
class RuleSet {
public:
    Lexicon lexicon;

    // Throws ValidationError on a duplicate head or a malformed body.
    void add(Rule rule);
    const Rule* find(Symbol head) const;
    const std::map<Symbol, Rule>& rules() const { return rules_; }
    std::size_t size() const { return rules_.size(); }
    std::size_t count(SymbolKind head_kind) const;

    // Throws ClosureError if a body mentions a non-terminal without a rule.
    void validate_closure() const;

    std::string name(Symbol s) const { return symbol_name(s, lexicon); }

private:
    std::map<Symbol, Rule> rules_;
};

RuleSet extract_rules(const Graph& graph, const Inventory& inventory);

// `HEAD -> a b c` for sequences, `HEAD -> a | b | c` for alternatives.
// Order: ROOT, S rules, patterns, classes; each by id.
std::string serialize_rules(const RuleSet& rules);
RuleSet parse_rules(std::string_view text);
RuleSet load_rules(const std::filesystem::path& path);

// Leaves of `nodes` if every pattern node matches its rule, else nullopt.
std::optional<std::vector<Symbol>> expand_derivation(const RuleSet& rules, std::span<const Derivation> nodes);

struct ParseTree {
    Symbol symbol;
    std::string label;
    std::vector<ParseTree> children;
    std::size_t start = 0;  // token span [start, end)
    std::size_t end = 0;

    bool is_terminal() const { return children.empty(); }
};

// Greedy bottom-up reducer: repeatedly takes the leftmost position where a
// pattern body matches (longest body first, newest pattern on ties) and
// replaces the window with the pattern, until nothing matches.
class SentenceParser {
public:
    explicit SentenceParser(const RuleSet& rules);

    // Throws ArgumentError on an empty token list.
    ParseTree parse(std::span<const std::string> tokens) const;

private:
    bool accepts(Symbol element, Symbol candidate) const;
    std::vector<Symbol> class_chain(Symbol klass, Symbol candidate) const;

    const RuleSet& rules_;
    std::unordered_map<Symbol, std::vector<const Rule*>, SymbolHash> by_first_;
    std::unordered_map<Symbol, std::unordered_set<Symbol, SymbolHash>, SymbolHash> class_members_;
};

ParseTree parse_sentence(const RuleSet& rules, const Sentence& sentence);

// `(ROOT (S (Pattern_1 john (E_1 likes) to) run))`
std::string bracketed(const ParseTree& tree);

// Pre-order list of the pattern nodes of a tree.
std::vector<const ParseTree*> pattern_nodes(const ParseTree& tree);

}  // namespace madios
