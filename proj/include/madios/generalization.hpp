#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "madios/graph.hpp"
#include "madios/inventory.hpp"

namespace madios {

// Exact non-negative fraction; thresholds are compared by cross-multiplying.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    // Accepts "0.5", "1", ".25" or "1/3".
    static Rational parse(std::string_view text);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
    friend bool operator==(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num) * b.den == static_cast<__int128>(b.num) * a.den;
    }
};

// |A ∩ B| / |A ∪ B|.
struct OverlapRatio {
    std::size_t intersection = 0;
    std::size_t union_size = 0;

    Rational ratio() const {
        return {static_cast<std::int64_t>(intersection), static_cast<std::int64_t>(union_size)};
    }
    bool at_least(const Rational& sigma) const { return ratio() >= sigma; }
    double value() const { return ratio().value(); }
};

OverlapRatio overlap(const EquivalenceClass& a, const EquivalenceClass& b);
OverlapRatio overlap(const std::vector<Symbol>& a, const std::vector<Symbol>& b);

// Two patterns are equivalent when at least two of (left, class members,
// right) agree. A missing slot never matches.
bool pattern_equivalent(const Inventory& inventory, const Pattern& a, const Pattern& b);

enum class Branch {
    SharedLeft,    // same left context, overlapping classes
    SharedRight,   // same right context, overlapping classes
    SharedBoth,    // same left and right context
};

std::string_view branch_name(Branch branch);

// What merging two patterns would produce, computed without mutating.
struct GeneralizationPlan {
    Branch branch = Branch::SharedBoth;
    std::vector<Symbol> slot_members;     // E_i ∪ E_j
    std::vector<Symbol> context_members;  // new context class; empty for SharedBoth
};

std::optional<GeneralizationPlan> plan_generalization(const Inventory& inventory, const Pattern& a,
                                                      const Pattern& b, const Rational& sigma);

// Applies the plan: registers the merged slot class (and the new context
// class for one-sided merges), creates the generalized pattern, supersedes
// both sources and, when `graph` is given, moves their occurrences onto the
// new pattern. Returns the new pattern id.
std::optional<std::uint32_t> generalize_pair(Inventory& inventory, Graph* graph, std::uint32_t a,
                                             std::uint32_t b, const Rational& sigma);

}  // namespace madios
