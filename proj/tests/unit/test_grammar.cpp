#include <doctest.h>

#include <filesystem>
#include <random>

#include "madios/error.hpp"
#include "madios/grammar.hpp"
#include "madios/induction.hpp"
#include "oracles.hpp"

using namespace madios;

namespace {

Corpus toy() {
    return Corpus::from_lines({"john likes to run", "john hates to eat", "john hates to dance", "mary hates eating"});
}

InductionConfig ratio_only() {
    InductionConfig c;
    c.alpha = 1.0;
    return c;
}

RuleSet toy_rules() {
    auto r = induce(toy(), ratio_only());
    return extract_rules(r.graph, r.inventory);
}

std::vector<std::string> leaves(const ParseTree& t) {
    if (t.is_terminal()) return {t.label};
    std::vector<std::string> out;
    for (const auto& c : t.children) {
        auto sub = leaves(c);
        out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
}

void check_spans(const ParseTree& t) {
    if (t.is_terminal()) {
        CHECK(t.end == t.start + 1);
        return;
    }
    CHECK(t.children.front().start == t.start);
    CHECK(t.children.back().end == t.end);
    for (std::size_t i = 1; i < t.children.size(); ++i) CHECK(t.children[i - 1].end == t.children[i].start);
    for (const auto& c : t.children) check_spans(c);
}

std::vector<std::string> labels(const std::vector<ParseTree>& nodes) {
    std::vector<std::string> out;
    for (const auto& n : nodes) out.push_back(n.label);
    return out;
}

const std::string kToyGrammar =
    "ROOT -> S | S_1 | S_2 | S_3\n"
    "S -> Pattern_1 run\n"
    "S_1 -> Pattern_1 eat\n"
    "S_2 -> Pattern_1 dance\n"
    "S_3 -> mary hates eating\n"
    "Pattern_1 -> john E_1 to\n"
    "E_1 -> likes | hates\n";

}  // namespace

TEST_CASE("toy grammar") {
    auto rules = toy_rules();
    CHECK(serialize_rules(rules) == kToyGrammar);
    CHECK(rules.count(SymbolKind::Pattern) == 1);
    CHECK(rules.count(SymbolKind::Class) == 1);
    CHECK(rules.count(SymbolKind::Sentence) == 4);
    CHECK_NOTHROW(rules.validate_closure());
}

TEST_CASE("no patterns leaves flat sentence rules") {
    auto corpus = Corpus::from_lines({"a b c", "d e", "a b c"});
    auto r = induce(corpus, ratio_only());
    auto rules = extract_rules(r.graph, r.inventory);
    CHECK(serialize_rules(rules) == "ROOT -> S | S_1\nS -> a b c\nS_1 -> d e\n");
}

TEST_CASE("rule file parsing") {
    SUBCASE("comments and blank lines") {
        auto rules = parse_rules("# header\n\nROOT -> S\nS -> a b\n");
        CHECK(rules.size() == 2);
    }
    SUBCASE("malformed line") {
        try {
            parse_rules("ROOT -> S\nS a b\n");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("unknown head") { CHECK_THROWS_AS(parse_rules("X -> a b\n"), ParseError); }
    SUBCASE("dangling reference") { CHECK_THROWS_AS(parse_rules("ROOT -> S\nS -> a Pattern_4\n"), ClosureError); }
    SUBCASE("empty alternative") { CHECK_THROWS_AS(parse_rules("E_1 -> a |\n"), ParseError); }
    SUBCASE("short pattern body") { CHECK_THROWS_AS(parse_rules("Pattern_1 -> a\n"), ParseError); }
    SUBCASE("duplicate head") { CHECK_THROWS_AS(parse_rules("E_1 -> a\nE_1 -> b\n"), ParseError); }
    SUBCASE("alternatives in a pattern rule") { CHECK_THROWS_AS(parse_rules("Pattern_1 -> a | b\n"), ParseError); }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_rules("/nonexistent/grammar"), IoError); }
}

TEST_CASE("reserved characters in words survive a round trip") {
    RuleSet rules;
    const auto bar = rules.lexicon.intern("|");
    const auto arrow = rules.lexicon.intern("->");
    const auto slash = rules.lexicon.intern("\\x");
    rules.add({Symbol::root(), RuleKind::Alternatives, {Symbol::sentence(0)}});
    rules.add({Symbol::sentence(0), RuleKind::Sequence, {Symbol::word(bar), Symbol::word(arrow), Symbol::word(slash)}});
    const auto text = serialize_rules(rules);
    auto back = parse_rules(text);
    CHECK(serialize_rules(back) == text);
    CHECK(back.lexicon.find("->") != Symbol::kUnknownWord);
}

TEST_CASE("nested rules parse the fedex sentence") {
    auto rules = load_rules(std::filesystem::path(MADIOS_TEST_DATA) / "fedex.grammar");
    const std::vector<std::string> tokens{"john", "fedexed", "his", "package", "to", "his", "mother"};
    SentenceParser parser(rules);
    auto tree = parser.parse(tokens);
    CHECK(tree.label == "ROOT");
    REQUIRE(tree.children.size() == 1);
    const auto& s = tree.children[0];
    CHECK(s.label == "S");
    CHECK(labels(s.children) == std::vector<std::string>{"john", "Pattern_118", "mother"});
    const auto& p118 = s.children[1];
    CHECK(p118.start == 1);
    CHECK(p118.end == 6);
    CHECK(bracketed(tree) ==
          "(ROOT (S john (Pattern_118 fedexed (E_56 (Pattern_109 his (E_55 package) to)) his) mother))");
    auto patterns = pattern_nodes(tree);
    REQUIRE(patterns.size() == 2);
    CHECK(patterns[0]->label == "Pattern_118");
    CHECK(patterns[1]->label == "Pattern_109");
    CHECK(leaves(tree) == tokens);
    check_spans(tree);
}

TEST_CASE("unknown words parse flat") {
    auto rules = toy_rules();
    auto tree = parse_sentence(rules, Sentence{0, {"zebra", "quux"}});
    CHECK(bracketed(tree) == "(ROOT (S zebra quux))");
    CHECK_THROWS_AS(parse_sentence(rules, Sentence{0, {}}), ArgumentError);
}

TEST_CASE("toy sentence reduces to the pattern") {
    auto rules = toy_rules();
    auto tree = parse_sentence(rules, Sentence{0, {"john", "likes", "to", "run"}});
    const auto& s = tree.children.at(0);
    CHECK(labels(s.children) == std::vector<std::string>{"Pattern_1", "run"});
    CHECK(s.children[0].start == 0);
    CHECK(s.children[0].end == 3);
    CHECK(bracketed(tree) == "(ROOT (S (Pattern_1 john (E_1 likes) to) run))");
}

TEST_CASE("induced grammars round-trip, expand and parse losslessly") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 80; ++trial) {
        auto corpus = Corpus::from_lines(oracle::random_corpus(rng, 8, 7, 3));
        auto r = induce(corpus, ratio_only());
        auto rules = extract_rules(r.graph, r.inventory);
        const auto text = serialize_rules(rules);
        auto back = parse_rules(text);
        REQUIRE(serialize_rules(back) == text);

        SentenceParser parser(back);
        for (const auto& s : corpus.sentences()) {
            const auto& path = r.graph.path(s.id);
            auto expanded = expand_derivation(rules, path.nodes);
            REQUIRE(expanded.has_value());
            std::vector<std::string> words;
            for (auto sym : *expanded) words.push_back(rules.name(sym));
            CHECK(words == s.tokens);

            auto tree = parser.parse(s.tokens);
            CHECK(leaves(tree) == s.tokens);
            check_spans(tree);
            CHECK(bracketed(parser.parse(s.tokens)) == bracketed(tree));
            const bool contributed = std::any_of(path.symbols.begin(), path.symbols.end(),
                                                 [](Symbol x) { return x.is_pattern(); });
            if (contributed) CHECK_FALSE(pattern_nodes(tree).empty());
        }
    }
}
