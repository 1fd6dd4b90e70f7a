#include "madios/grammar.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "madios/error.hpp"

namespace madios {

namespace {

bool is_nonterminal(Symbol s) {
    return s.is_pattern() || s.is_class() || s.kind == SymbolKind::Sentence || s.kind == SymbolKind::Root;
}

RuleKind kind_for_head(Symbol head) {
    return head.is_class() || head.kind == SymbolKind::Root ? RuleKind::Alternatives : RuleKind::Sequence;
}

int serialization_rank(SymbolKind k) {
    switch (k) {
        case SymbolKind::Root: return 0;
        case SymbolKind::Sentence: return 1;
        case SymbolKind::Pattern: return 2;
        case SymbolKind::Class: return 3;
        default: return 4;
    }
}

std::string escape_word(const std::string& w) {
    if (w == "|" || w == "->" || (!w.empty() && w.front() == '\\')) return "\\" + w;
    return w;
}

std::optional<std::uint32_t> parse_suffix(std::string_view text, std::string_view prefix) {
    if (text.size() <= prefix.size() || text.substr(0, prefix.size()) != prefix) return std::nullopt;
    auto digits = text.substr(prefix.size());
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
    if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
    return v;
}

// Non-terminal names; anything else is a word.
std::optional<Symbol> parse_nonterminal(std::string_view token) {
    if (token == "ROOT") return Symbol::root();
    if (token == "S") return Symbol::sentence(0);
    if (auto id = parse_suffix(token, "S_"); id && *id > 0) return Symbol::sentence(*id);
    if (auto id = parse_suffix(token, "Pattern_")) return Symbol::pattern(*id);
    if (auto id = parse_suffix(token, "E_")) return Symbol::klass(*id);
    return std::nullopt;
}

}  // namespace

void RuleSet::add(Rule rule) {
    if (!is_nonterminal(rule.head)) throw ValidationError("rule head must be a non-terminal");
    if (rule.kind != kind_for_head(rule.head)) throw ValidationError("wrong rule kind for " + name(rule.head));
    if (rule.body.empty()) throw ValidationError("empty body for " + name(rule.head));
    if (rule.head.is_pattern() && rule.body.size() < 2)
        throw ValidationError("pattern rule " + name(rule.head) + " needs at least two symbols");
    for (auto s : rule.body) {
        if (s.is_boundary() || s.kind == SymbolKind::Root) throw ValidationError("invalid symbol in " + name(rule.head));
    }
    auto head = rule.head;
    if (!rules_.emplace(head, std::move(rule)).second) throw ValidationError("duplicate rule for " + name(head));
}

const Rule* RuleSet::find(Symbol head) const {
    auto it = rules_.find(head);
    return it == rules_.end() ? nullptr : &it->second;
}

std::size_t RuleSet::count(SymbolKind head_kind) const {
    return static_cast<std::size_t>(
        std::count_if(rules_.begin(), rules_.end(), [&](const auto& kv) { return kv.first.kind == head_kind; }));
}

void RuleSet::validate_closure() const {
    for (const auto& [head, rule] : rules_) {
        for (auto s : rule.body) {
            if (is_nonterminal(s) && !rules_.count(s))
                throw ClosureError(name(head) + " references " + name(s) + " which has no rule");
        }
    }
}

RuleSet extract_rules(const Graph& graph, const Inventory& inventory) {
    RuleSet rules;
    rules.lexicon = graph.lexicon();

    std::map<std::vector<Symbol>, std::uint32_t> sentence_heads;
    std::vector<Symbol> root_alternatives;
    std::deque<Symbol> pending;
    for (const auto& [id, path] : graph.paths()) {
        std::vector<Symbol> body(path.symbols.begin() + 1, path.symbols.end() - 1);
        auto [it, inserted] = sentence_heads.emplace(body, static_cast<std::uint32_t>(sentence_heads.size()));
        if (!inserted) continue;
        const Symbol head = Symbol::sentence(it->second);
        root_alternatives.push_back(head);
        pending.insert(pending.end(), body.begin(), body.end());
        rules.add({head, RuleKind::Sequence, std::move(body)});
    }
    rules.add({Symbol::root(), RuleKind::Alternatives, root_alternatives});

    std::set<Symbol> seen;
    while (!pending.empty()) {
        const Symbol s = pending.front();
        pending.pop_front();
        if (!(s.is_pattern() || s.is_class()) || !seen.insert(s).second) continue;
        if (s.is_pattern()) {
            const auto& p = inventory.pattern(s.id);
            pending.insert(pending.end(), p.surface.begin(), p.surface.end());
            rules.add({s, RuleKind::Sequence, p.surface});
        } else {
            const auto& c = inventory.klass(s.id);
            pending.insert(pending.end(), c.members.begin(), c.members.end());
            rules.add({s, RuleKind::Alternatives, c.members});
        }
    }
    rules.validate_closure();
    return rules;
}

std::string serialize_rules(const RuleSet& rules) {
    std::vector<const Rule*> ordered;
    for (const auto& [head, rule] : rules.rules()) ordered.push_back(&rule);
    std::stable_sort(ordered.begin(), ordered.end(), [](const Rule* a, const Rule* b) {
        auto ra = serialization_rank(a->head.kind), rb = serialization_rank(b->head.kind);
        return ra != rb ? ra < rb : a->head.id < b->head.id;
    });

    std::ostringstream out;
    for (const Rule* rule : ordered) {
        if (rule->body.empty()) throw ValidationError("refusing to serialize empty rule " + rules.name(rule->head));
        out << rules.name(rule->head) << " ->";
        for (std::size_t i = 0; i < rule->body.size(); ++i) {
            if (i && rule->kind == RuleKind::Alternatives) out << " |";
            const Symbol s = rule->body[i];
            out << ' ' << (s.is_word() ? escape_word(rules.lexicon.word(s.id)) : rules.name(s));
        }
        out << '\n';
    }
    return out.str();
}

RuleSet parse_rules(std::string_view text) {
    RuleSet rules;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream fields(line);
        std::vector<std::string> tokens;
        for (std::string t; fields >> t;) tokens.push_back(std::move(t));
        if (tokens.empty() || tokens.front().front() == '#') continue;
        if (tokens.size() < 3 || tokens[1] != "->") throw ParseError("expected 'HEAD -> body'", lineno);

        auto head = parse_nonterminal(tokens[0]);
        if (!head) throw ParseError("'" + tokens[0] + "' is not a non-terminal name", lineno);
        Rule rule{*head, kind_for_head(*head), {}};

        for (std::size_t i = 2; i < tokens.size(); ++i) {
            const auto& t = tokens[i];
            const bool separator_slot = rule.kind == RuleKind::Alternatives && (i - 2) % 2 == 1;
            if (separator_slot) {
                if (t != "|") throw ParseError("expected '|' between alternatives", lineno);
                continue;
            }
            if (t == "|" || t == "->") throw ParseError("unexpected '" + t + "'", lineno);
            if (auto nt = parse_nonterminal(t)) {
                rule.body.push_back(*nt);
            } else {
                std::string_view w = t;
                if (w.front() == '\\') w.remove_prefix(1);
                if (w.empty()) throw ParseError("empty word", lineno);
                rule.body.push_back(Symbol::word(rules.lexicon.intern(w)));
            }
        }
        if (rule.kind == RuleKind::Alternatives && (tokens.size() - 2) % 2 == 0)
            throw ParseError("dangling '|'", lineno);
        try {
            rules.add(std::move(rule));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    rules.validate_closure();
    return rules;
}

RuleSet load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read grammar file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_rules(text.str());
}

namespace {

bool rule_accepts(const RuleSet& rules, Symbol element, Symbol candidate, int depth = 0) {
    if (element == candidate) return true;
    if (!element.is_class() || depth > 64) return false;
    const Rule* rule = rules.find(element);
    if (!rule) return false;
    return std::any_of(rule->body.begin(), rule->body.end(),
                       [&](Symbol alt) { return rule_accepts(rules, alt, candidate, depth + 1); });
}

bool expand_node(const RuleSet& rules, const Derivation& node, std::vector<Symbol>& leaves) {
    if (node.children.empty()) {
        if (node.symbol.is_word()) leaves.push_back(node.symbol);
        return node.symbol.is_word() || node.symbol.is_boundary();
    }
    const Rule* rule = rules.find(node.symbol);
    if (!rule || rule->kind != RuleKind::Sequence || rule->body.size() != node.children.size()) return false;
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (!rule_accepts(rules, rule->body[i], node.children[i].symbol)) return false;
        if (!expand_node(rules, node.children[i], leaves)) return false;
    }
    return true;
}

}  // namespace

std::optional<std::vector<Symbol>> expand_derivation(const RuleSet& rules, std::span<const Derivation> nodes) {
    std::vector<Symbol> leaves;
    for (const auto& n : nodes) {
        if (!expand_node(rules, n, leaves)) return std::nullopt;
    }
    return leaves;
}

SentenceParser::SentenceParser(const RuleSet& rules) : rules_(rules) {
    std::function<void(Symbol, std::unordered_set<Symbol, SymbolHash>&, int)> collect =
        [&](Symbol klass, std::unordered_set<Symbol, SymbolHash>& out, int depth) {
            const Rule* rule = rules.find(klass);
            if (!rule || depth > 64) return;
            for (auto m : rule->body) {
                if (m.is_class()) collect(m, out, depth + 1);
                else out.insert(m);
            }
        };
    for (const auto& [head, rule] : rules.rules()) {
        if (head.is_class()) collect(head, class_members_[head], 0);
    }
    for (const auto& [head, rule] : rules.rules()) {
        if (!head.is_pattern()) continue;
        const Symbol first = rule.body.front();
        if (first.is_class()) {
            for (auto m : class_members_[first]) by_first_[m].push_back(&rule);
        } else {
            by_first_[first].push_back(&rule);
        }
    }
}

bool SentenceParser::accepts(Symbol element, Symbol candidate) const {
    if (element == candidate) return true;
    if (!element.is_class()) return false;
    auto it = class_members_.find(element);
    return it != class_members_.end() && it->second.count(candidate);
}

std::vector<Symbol> SentenceParser::class_chain(Symbol klass, Symbol candidate) const {
    // Classes from `klass` down to the one that lists `candidate` directly.
    std::vector<Symbol> chain{klass};
    for (int depth = 0; depth < 64; ++depth) {
        const Rule* rule = rules_.find(chain.back());
        if (!rule) break;
        if (std::find(rule->body.begin(), rule->body.end(), candidate) != rule->body.end()) break;
        auto next = std::find_if(rule->body.begin(), rule->body.end(),
                                 [&](Symbol m) { return m.is_class() && accepts(m, candidate); });
        if (next == rule->body.end()) break;
        chain.push_back(*next);
    }
    return chain;
}

ParseTree SentenceParser::parse(std::span<const std::string> tokens) const {
    if (tokens.empty()) throw ArgumentError("cannot parse an empty sentence");
    std::vector<ParseTree> items;
    items.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto id = rules_.lexicon.find(tokens[i]);
        items.push_back({Symbol::word(id), tokens[i], {}, i, i + 1});
    }

    while (true) {
        const Rule* chosen = nullptr;
        std::size_t at = 0;
        for (std::size_t i = 0; i < items.size() && !chosen; ++i) {
            auto it = by_first_.find(items[i].symbol);
            if (it == by_first_.end()) continue;
            for (const Rule* rule : it->second) {
                const auto width = rule->body.size();
                if (i + width > items.size()) continue;
                bool ok = true;
                for (std::size_t j = 0; j < width && ok; ++j) ok = accepts(rule->body[j], items[i + j].symbol);
                if (!ok) continue;
                if (!chosen || width > chosen->body.size() ||
                    (width == chosen->body.size() && rule->head.id > chosen->head.id)) {
                    chosen = rule;
                    at = i;
                }
            }
        }
        if (!chosen) break;

        const auto width = chosen->body.size();
        ParseTree node{chosen->head, rules_.name(chosen->head), {}, items[at].start, items[at + width - 1].end};
        for (std::size_t j = 0; j < width; ++j) {
            ParseTree child = std::move(items[at + j]);
            if (chosen->body[j].is_class()) {
                auto chain = class_chain(chosen->body[j], child.symbol);
                for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                    ParseTree wrap{*it, rules_.name(*it), {}, child.start, child.end};
                    wrap.children.push_back(std::move(child));
                    child = std::move(wrap);
                }
            }
            node.children.push_back(std::move(child));
        }
        items.erase(items.begin() + static_cast<std::ptrdiff_t>(at) + 1,
                    items.begin() + static_cast<std::ptrdiff_t>(at + width));
        items[at] = std::move(node);
    }

    ParseTree s{Symbol::sentence(0), "S", std::move(items), 0, tokens.size()};
    ParseTree root{Symbol::root(), "ROOT", {}, 0, tokens.size()};
    root.children.push_back(std::move(s));
    return root;
}

ParseTree parse_sentence(const RuleSet& rules, const Sentence& sentence) {
    return SentenceParser(rules).parse(sentence.tokens);
}

namespace {
void write_bracketed(const ParseTree& t, std::string& out) {
    if (t.is_terminal()) {
        out += t.label;
        return;
    }
    out += '(';
    out += t.label;
    for (const auto& c : t.children) {
        out += ' ';
        write_bracketed(c, out);
    }
    out += ')';
}

void collect_patterns(const ParseTree& t, std::vector<const ParseTree*>& out) {
    if (t.symbol.is_pattern() && !t.is_terminal()) out.push_back(&t);
    for (const auto& c : t.children) collect_patterns(c, out);
}
}  // namespace

std::string bracketed(const ParseTree& tree) {
    std::string out;
    write_bracketed(tree, out);
    return out;
}

std::vector<const ParseTree*> pattern_nodes(const ParseTree& tree) {
    std::vector<const ParseTree*> out;
    collect_patterns(tree, out);
    return out;
}

}  // namespace madios
