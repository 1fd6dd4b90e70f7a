#include "madios/generalization.hpp"

#include <algorithm>
#include <charconv>
#include <iterator>
#include <numeric>

#include "madios/error.hpp"

namespace madios {

Rational Rational::parse(std::string_view text) {
    auto fail = [&] { return ParseError("not a number: '" + std::string(text) + "'"); };
    auto parse_int = [&](std::string_view s) {
        std::int64_t v = 0;
        if (s.empty()) throw fail();
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) throw fail();
        return v;
    };
    Rational r;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        r.num = parse_int(text.substr(0, slash));
        r.den = parse_int(text.substr(slash + 1));
        if (r.den == 0) throw fail();
    } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
        auto whole = text.substr(0, dot);
        auto frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12) throw fail();
        r.num = whole.empty() ? 0 : parse_int(whole);
        r.den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
        r.num = r.num * r.den + parse_int(frac);
    } else {
        r.num = parse_int(text);
    }
    auto g = std::gcd(r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

OverlapRatio overlap(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    std::vector<Symbol> sa(a), sb(b);
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::vector<Symbol> both, either;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(both));
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(either));
    return {both.size(), either.size()};
}

OverlapRatio overlap(const EquivalenceClass& a, const EquivalenceClass& b) { return overlap(a.members, b.members); }

bool pattern_equivalent(const Inventory& inventory, const Pattern& a, const Pattern& b) {
    int agree = 0;
    if (a.left == b.left) ++agree;
    if (a.right == b.right) ++agree;
    if (a.slot && b.slot && inventory.klass(a.slot->id).members == inventory.klass(b.slot->id).members) ++agree;
    return agree >= 2;
}

std::string_view branch_name(Branch branch) {
    switch (branch) {
        case Branch::SharedLeft: return "shared-left";
        case Branch::SharedRight: return "shared-right";
        case Branch::SharedBoth: return "shared-both";
    }
    return "?";
}

namespace {

std::vector<Symbol> set_union_of(std::vector<Symbol> a, const std::vector<Symbol>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

// Classes that a merge absorbs: the two slots plus any class used as a
// differing context on a one-sided merge.
std::vector<std::uint32_t> absorbed_classes(const Pattern& a, const Pattern& b, const GeneralizationPlan& plan) {
    std::vector<std::uint32_t> out{a.slot->id, b.slot->id};
    if (plan.branch == Branch::SharedLeft) {
        if (a.right.is_class()) out.push_back(a.right.id);
        if (b.right.is_class()) out.push_back(b.right.id);
    } else if (plan.branch == Branch::SharedRight) {
        if (a.left.is_class()) out.push_back(a.left.id);
        if (b.left.is_class()) out.push_back(b.left.id);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::optional<GeneralizationPlan> plan_generalization(const Inventory& inventory, const Pattern& a,
                                                      const Pattern& b, const Rational& sigma) {
    if (!a.slot || !b.slot) return std::nullopt;
    const auto& ea = inventory.klass(a.slot->id).members;
    const auto& eb = inventory.klass(b.slot->id).members;
    const bool same_left = a.left == b.left;
    const bool same_right = a.right == b.right;

    GeneralizationPlan plan;
    if (same_left && same_right) {
        plan.branch = Branch::SharedBoth;
    } else if (same_left && overlap(ea, eb).at_least(sigma)) {
        plan.branch = Branch::SharedLeft;
        plan.context_members = set_union_of(inventory.flatten(a.right), inventory.flatten(b.right));
    } else if (same_right && overlap(ea, eb).at_least(sigma)) {
        plan.branch = Branch::SharedRight;
        plan.context_members = set_union_of(inventory.flatten(a.left), inventory.flatten(b.left));
    } else {
        return std::nullopt;
    }
    plan.slot_members = set_union_of(ea, eb);

    if (plan.branch != Branch::SharedBoth) {
        // The new context class must stay disjoint from the merged slot and
        // from every class the merge does not absorb.
        auto absorbed = absorbed_classes(a, b, plan);
        for (auto m : plan.context_members) {
            if (m.is_boundary()) return std::nullopt;
            if (std::binary_search(plan.slot_members.begin(), plan.slot_members.end(), m)) return std::nullopt;
            if (auto owner = inventory.owner(m);
                owner && !std::binary_search(absorbed.begin(), absorbed.end(), *owner)) {
                return std::nullopt;
            }
        }
    }
    return plan;
}

std::optional<std::uint32_t> generalize_pair(Inventory& inventory, Graph* graph, std::uint32_t a_id,
                                             std::uint32_t b_id, const Rational& sigma) {
    if (a_id == b_id) throw ArgumentError("cannot generalize a pattern with itself");
    const Pattern a = inventory.pattern(a_id);
    const Pattern b = inventory.pattern(b_id);
    auto plan = plan_generalization(inventory, a, b, sigma);
    if (!plan) return std::nullopt;

    // Release every absorbed class before registering the unions so the
    // disjointness check in add_class sees the post-merge state.
    std::uint32_t slot_id = a.slot->id;
    const bool same_slot = a.slot->id == b.slot->id;
    std::vector<std::uint32_t> context_sources;
    if (plan->branch == Branch::SharedLeft) {
        for (auto s : {a.right, b.right}) if (s.is_class()) context_sources.push_back(s.id);
    } else if (plan->branch == Branch::SharedRight) {
        for (auto s : {a.left, b.left}) if (s.is_class()) context_sources.push_back(s.id);
    }

    // add_class hands out ids sequentially, so the union's id is known here.
    const auto next_class = static_cast<std::uint32_t>(inventory.classes().size() + 1);
    if (!same_slot) {
        inventory.retire_class(a.slot->id, next_class);
        inventory.retire_class(b.slot->id, next_class);
        slot_id = inventory.add_class(plan->slot_members).id;
    }

    std::optional<std::uint32_t> context_id;
    if (plan->branch != Branch::SharedBoth) {
        const auto target = static_cast<std::uint32_t>(inventory.classes().size() + 1);
        for (auto id : context_sources) {
            if (inventory.klass(id).active) inventory.retire_class(id, target);
        }
        context_id = inventory.add_class(plan->context_members).id;
    }

    Symbol left = a.left, right = a.right;
    if (plan->branch == Branch::SharedLeft) right = Symbol::klass(*context_id);
    if (plan->branch == Branch::SharedRight) left = Symbol::klass(*context_id);
    // Contexts may have been repointed by the slot merge.
    if (left.is_class() && !inventory.klass(left.id).active) left = Symbol::klass(*inventory.klass(left.id).merged_into);
    if (right.is_class() && !inventory.klass(right.id).active)
        right = Symbol::klass(*inventory.klass(right.id).merged_into);

    const Symbol slot = Symbol::klass(slot_id);
    const std::vector<Symbol> surface{left, slot, right};
    std::uint32_t result;
    if (auto existing = inventory.find_active_pattern(surface); existing && *existing != a_id && *existing != b_id) {
        result = *existing;
    } else {
        result = inventory.add_pattern(left, slot, right).id;
    }
    inventory.supersede_pattern(a_id, result);
    inventory.supersede_pattern(b_id, result);

    if (graph) {
        const Symbol sa = Symbol::pattern(a_id), sb = Symbol::pattern(b_id), target = Symbol::pattern(result);
        std::vector<std::pair<SentenceId, std::size_t>> sites;
        for (const auto& [id, path] : graph->paths()) {
            for (std::size_t i = 0; i < path.symbols.size(); ++i) {
                if (path.symbols[i] == sa || path.symbols[i] == sb) sites.emplace_back(id, i);
            }
        }
        for (auto [id, pos] : sites) graph->relabel(id, pos, target);
        apply_pattern(*graph, inventory, inventory.pattern(result));
    }
    return result;
}

}  // namespace madios
