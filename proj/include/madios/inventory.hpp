#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "madios/graph.hpp"
#include "madios/symbol.hpp"

namespace madios {

// Symbols interchangeable in one context. Members are sorted and never
// boundaries or classes; classes nest only through pattern members.
struct EquivalenceClass {
    std::uint32_t id = 0;
    std::vector<Symbol> members;
    bool active = true;
    std::optional<std::uint32_t> merged_into;

    Symbol symbol() const { return Symbol::klass(id); }
};

// (left, slot, right). A slotless pattern has surface (left, right).
struct Pattern {
    std::uint32_t id = 0;
    Symbol left;
    std::optional<Symbol> slot;
    Symbol right;
    std::vector<Symbol> surface;
    bool active = true;
    std::optional<std::uint32_t> superseded_by;

    Symbol symbol() const { return Symbol::pattern(id); }
};

// Registry of induced patterns and classes. Ids start at 1. Every member
// symbol belongs to at most one active class.
class Inventory {
public:
    const std::vector<Pattern>& patterns() const { return patterns_; }
    const std::vector<EquivalenceClass>& classes() const { return classes_; }
    const Pattern& pattern(std::uint32_t id) const { return patterns_.at(id - 1); }
    const EquivalenceClass& klass(std::uint32_t id) const { return classes_.at(id - 1); }

    // Active class containing `member`, if any.
    std::optional<std::uint32_t> owner(Symbol member) const;

    // Registers a class. Throws EmptyClassError for an empty member list and
    // ValidationError if a member already belongs to an active class.
    const EquivalenceClass& add_class(std::vector<Symbol> members);

    // Registers a pattern; a slot, when present, must be a class symbol.
    const Pattern& add_pattern(Symbol left, std::optional<Symbol> slot, Symbol right);

    // Deactivates `id`, releases its members and points every active pattern
    // that referenced it at `into`.
    void retire_class(std::uint32_t id, std::uint32_t into);
    void supersede_pattern(std::uint32_t id, std::uint32_t by);

    std::optional<std::uint32_t> find_active_pattern(std::span<const Symbol> surface) const;

    // True when `element` (a surface position) accepts `candidate` (a path
    // symbol): equal symbols, or `element` is a class containing it.
    bool accepts(Symbol element, Symbol candidate) const;
    bool matches(std::span<const Symbol> surface, std::span<const Symbol> window) const;

    // Member set of a class symbol, or {s} for anything else.
    std::vector<Symbol> flatten(Symbol s) const;

private:
    std::vector<Pattern> patterns_;
    std::vector<EquivalenceClass> classes_;
    std::unordered_map<Symbol, std::uint32_t, SymbolHash> owner_;
};

// Collapses every non-overlapping, leftmost-first window that matches the
// pattern's surface in every path. Returns the number of windows rewired.
std::size_t apply_pattern(Graph& graph, const Inventory& inventory, const Pattern& pattern);

}  // namespace madios
