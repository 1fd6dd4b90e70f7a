#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "madios/corpus.hpp"
#include "madios/generalization.hpp"
#include "madios/graph.hpp"
#include "madios/inventory.hpp"

namespace madios {

struct InductionConfig {
    double eta = 0.65;            // a continuation ratio below eta is a drop
    double alpha = 0.01;          // binomial test level; 1 keeps only the ratio rule
    std::size_t min_support = 2;  // minimum occurrences of a candidate span
    Rational sigma{1, 2};         // class overlap needed for one-sided merges
    std::size_t max_iterations = 1000;  // passes over all paths

    void validate() const;
    // Applies one `key=value` assignment. Throws ParseError on unknown keys
    // or bad values.
    void set(std::string_view key, std::string_view value);
    std::string to_string() const;
};

InductionConfig parse_config(std::istream& in);
InductionConfig load_config(const std::filesystem::path& path);

// P(next | prefix): count(symbols[0..=i]) / count(symbols[0..i)). Requires
// 1 <= i < size; 0 when the prefix never occurs.
double right_probability(const Graph& graph, std::span<const Symbol> symbols, std::size_t i);

// P(previous | suffix): count(symbols[i..]) / count(symbols[i+1..]). Requires
// i < size - 1; 0 when the suffix never occurs.
double left_probability(const Graph& graph, std::span<const Symbol> symbols, std::size_t i);

// P(X <= successes) for X ~ Binomial(trials, p).
double binomial_lower_tail(std::size_t successes, std::size_t trials, double p);

// Half-open span of path positions.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - start; }
    friend bool operator==(const Span&, const Span&) = default;
};

struct SignificanceScan {
    SentenceId path_id = 0;
    // P_R of each position given the path prefix from BEGIN (1 at BEGIN).
    std::vector<double> right_probs;
    // P_L of each position given the path suffix up to END (1 at END).
    std::vector<double> left_probs;
    std::optional<Span> chosen_span;
    // p-value of the weaker boundary of the chosen span.
    double chosen_p_value = 1.0;
};

// Candidate spans hold 2 or 3 interior symbols. A span qualifies when its
// support reaches min_support and each side is either a sentence boundary
// or a significant drop, with at least one real drop:
//   right drop: r = count(span+next) / count(span) compared with
//               count(span) / count(span minus last); drop when the ratio of
//               the two is below eta and the binomial lower tail of
//               count(span+next) successes in count(span) trials at
//               eta * count(span)/count(span minus last) is <= alpha.
//   left drop:  the mirror image with the previous symbol.
// The most significant span (smallest worst-side p-value) wins; ties go to
// the leftmost, then the longer span.
SignificanceScan scan_path(const Graph& graph, SentenceId path_id, const InductionConfig& config);
std::optional<Span> detect_significant_pattern(const Graph& graph, SentenceId path_id,
                                               const InductionConfig& config);

// Every symbol m with count([left, m, right]) >= 1, sorted. Throws
// EmptyClassError when there is none.
std::vector<Symbol> equivalence_candidates(const Graph& graph, Symbol left, Symbol right);

// Registers the class of candidates not already owned by another active
// class. Throws EmptyClassError when nothing is left.
const EquivalenceClass& extract_equivalence_class(const Graph& graph, Inventory& inventory, Symbol left,
                                                  Symbol right);

struct InductionResult {
    Graph graph;
    Inventory inventory;
    std::size_t passes = 0;
    std::size_t merges = 0;

    std::vector<Pattern> active_patterns() const;
};

// Runs the pattern-distillation loop to a fixpoint (or max_iterations passes).
InductionResult induce(const Corpus& corpus, const InductionConfig& config);

}  // namespace madios
