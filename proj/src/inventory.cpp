#include "madios/inventory.hpp"

#include <algorithm>

#include "madios/error.hpp"

namespace madios {

std::optional<std::uint32_t> Inventory::owner(Symbol member) const {
    auto it = owner_.find(member);
    if (it == owner_.end()) return std::nullopt;
    return it->second;
}

const EquivalenceClass& Inventory::add_class(std::vector<Symbol> members) {
    if (members.empty()) throw EmptyClassError("equivalence class needs at least one member");
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (auto m : members) {
        if (m.is_boundary() || m.is_class() || m.kind == SymbolKind::Sentence || m.kind == SymbolKind::Root)
            throw ValidationError("invalid equivalence class member");
        if (owner_.count(m)) throw ValidationError("symbol already belongs to an active class");
    }
    EquivalenceClass c;
    c.id = static_cast<std::uint32_t>(classes_.size() + 1);
    c.members = std::move(members);
    for (auto m : c.members) owner_[m] = c.id;
    classes_.push_back(std::move(c));
    return classes_.back();
}

const Pattern& Inventory::add_pattern(Symbol left, std::optional<Symbol> slot, Symbol right) {
    if (slot && !slot->is_class()) throw ArgumentError("pattern slot must be an equivalence class");
    Pattern p;
    p.id = static_cast<std::uint32_t>(patterns_.size() + 1);
    p.left = left;
    p.slot = slot;
    p.right = right;
    p.surface = slot ? std::vector<Symbol>{left, *slot, right} : std::vector<Symbol>{left, right};
    patterns_.push_back(std::move(p));
    return patterns_.back();
}

void Inventory::retire_class(std::uint32_t id, std::uint32_t into) {
    auto& c = classes_.at(id - 1);
    c.active = false;
    c.merged_into = into;
    for (auto m : c.members) {
        auto it = owner_.find(m);
        if (it != owner_.end() && it->second == id) owner_.erase(it);
    }
    const Symbol from = Symbol::klass(id), to = Symbol::klass(into);
    for (auto& p : patterns_) {
        if (!p.active) continue;
        auto swap = [&](Symbol& s) { if (s == from) s = to; };
        swap(p.left);
        swap(p.right);
        if (p.slot) swap(*p.slot);
        for (auto& s : p.surface) swap(s);
    }
}

void Inventory::supersede_pattern(std::uint32_t id, std::uint32_t by) {
    auto& p = patterns_.at(id - 1);
    p.active = false;
    p.superseded_by = by;
}

std::optional<std::uint32_t> Inventory::find_active_pattern(std::span<const Symbol> surface) const {
    for (const auto& p : patterns_) {
        if (p.active && std::equal(p.surface.begin(), p.surface.end(), surface.begin(), surface.end())) return p.id;
    }
    return std::nullopt;
}

bool Inventory::accepts(Symbol element, Symbol candidate) const {
    if (element == candidate) return true;
    if (!element.is_class()) return false;
    const auto& members = klass(element.id).members;
    return std::binary_search(members.begin(), members.end(), candidate);
}

bool Inventory::matches(std::span<const Symbol> surface, std::span<const Symbol> window) const {
    if (surface.size() != window.size()) return false;
    for (std::size_t i = 0; i < surface.size(); ++i) {
        if (!accepts(surface[i], window[i])) return false;
    }
    return true;
}

std::vector<Symbol> Inventory::flatten(Symbol s) const {
    if (s.is_class()) return klass(s.id).members;
    return {s};
}

std::size_t apply_pattern(Graph& graph, const Inventory& inventory, const Pattern& pattern) {
    const auto& surface = pattern.surface;
    const std::size_t width = surface.size();
    std::vector<Occurrence> found;
    for (const auto& [id, path] : graph.paths()) {
        const auto& s = path.symbols;
        std::size_t i = 1;
        while (i + width <= s.size() - 1) {
            if (inventory.matches(surface, std::span(s).subspan(i, width))) {
                found.push_back({id, i, i + width});
                i += width;
            } else {
                ++i;
            }
        }
    }
    graph.rewire(found, pattern.symbol(),
                 [&](std::span<const Symbol> w) { return inventory.matches(surface, w); });
    return found.size();
}

}  // namespace madios
