#include "madios/induction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "madios/error.hpp"

namespace madios {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view key, std::string_view value) {
    std::string text(value);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ParseError("bad value for " + std::string(key) + ": '" + text + "'");
    return v;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
    std::string text(value);
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError("bad value for " + std::string(key) + ": '" + text + "'");
    return static_cast<std::size_t>(std::stoull(text));
}

}  // namespace

void InductionConfig::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw ArgumentError("eta must lie in (0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must lie in (0, 1]");
    if (min_support < 1) throw ArgumentError("min_support must be positive");
    if (sigma.num <= 0 || sigma.num > sigma.den) throw ArgumentError("sigma must lie in (0, 1]");
    if (max_iterations < 1) throw ArgumentError("max_iterations must be positive");
}

void InductionConfig::set(std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "eta") eta = parse_double(key, value);
    else if (key == "alpha") alpha = parse_double(key, value);
    else if (key == "sigma") sigma = Rational::parse(value);
    else if (key == "min_support") min_support = parse_count(key, value);
    else if (key == "max_iterations") max_iterations = parse_count(key, value);
    else throw ParseError("unknown config key '" + std::string(key) + "'");
}

std::string InductionConfig::to_string() const {
    std::ostringstream out;
    out << "eta=" << eta << "\nalpha=" << alpha << "\nsigma=" << sigma.str() << "\nmin_support=" << min_support
        << "\nmax_iterations=" << max_iterations << "\n";
    return out.str();
}

InductionConfig parse_config(std::istream& in) {
    InductionConfig config;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value", lineno);
        try {
            config.set(body.substr(0, eq), body.substr(eq + 1));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    config.validate();
    return config;
}

InductionConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path.string());
    return parse_config(in);
}

double right_probability(const Graph& graph, std::span<const Symbol> symbols, std::size_t i) {
    if (i < 1 || i >= symbols.size()) throw ArgumentError("right_probability position out of range");
    auto den = graph.subpath_count(symbols.first(i));
    if (den == 0) return 0.0;
    return static_cast<double>(graph.subpath_count(symbols.first(i + 1))) / static_cast<double>(den);
}

double left_probability(const Graph& graph, std::span<const Symbol> symbols, std::size_t i) {
    if (symbols.size() < 2 || i >= symbols.size() - 1) throw ArgumentError("left_probability position out of range");
    auto den = graph.subpath_count(symbols.subspan(i + 1));
    if (den == 0) return 0.0;
    return static_cast<double>(graph.subpath_count(symbols.subspan(i))) / static_cast<double>(den);
}

double binomial_lower_tail(std::size_t successes, std::size_t trials, double p) {
    if (successes >= trials) return 1.0;
    boost::math::binomial_distribution<double> dist(static_cast<double>(trials), p);
    return boost::math::cdf(dist, static_cast<double>(successes));
}

namespace {

struct SideResult {
    bool boundary = false;
    bool significant = false;
    double p_value = 1.0;
};

// num / den < eta, exact when the double comparison is too close to call.
bool below_ratio(std::size_t num, std::size_t den, double eta) {
    const double lhs = static_cast<double>(num);
    const double rhs = eta * static_cast<double>(den);
    if (std::abs(lhs - rhs) > 1e-9 * std::max(lhs, rhs)) return lhs < rhs;
    using boost::multiprecision::cpp_rational;
    return cpp_rational(num) < cpp_rational(eta) * cpp_rational(den);
}

// `shorter` is the span with its far symbol removed, `longer` the span
// extended by the neighbouring symbol.
SideResult test_side(std::size_t span_count, std::size_t shorter_count, std::size_t longer_count,
                     const InductionConfig& config) {
    const double c = static_cast<double>(span_count);
    const double a = static_cast<double>(shorter_count);
    const double k = static_cast<double>(longer_count);
    SideResult side;
    const bool drop = below_ratio(longer_count * shorter_count, span_count * span_count, config.eta);
    side.p_value = binomial_lower_tail(longer_count, span_count, config.eta * c / a);
    side.significant = drop && side.p_value <= config.alpha;
    return side;
}

bool nearly_equal(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300}); }

SignificanceScan scan(const Graph& graph, SentenceId path_id, const InductionConfig& config, bool profiles) {
    SignificanceScan result;
    result.path_id = path_id;
    const auto& symbols = graph.path(path_id).symbols;
    const std::span<const Symbol> s(symbols);
    const std::size_t n = s.size();

    if (profiles) {
        result.right_probs.assign(n, 1.0);
        result.left_probs.assign(n, 1.0);
        for (std::size_t i = 1; i < n; ++i) result.right_probs[i] = right_probability(graph, s, i);
        for (std::size_t i = 0; i + 1 < n; ++i) result.left_probs[i] = left_probability(graph, s, i);
    }

    std::optional<Span> best;
    double best_score = 0.0;
    for (std::size_t start = 1; start + 1 < n; ++start) {
        for (std::size_t width = 2; width <= 3; ++width) {
            const std::size_t end = start + width;
            if (end > n - 1) break;
            const auto count = graph.subpath_count(s.subspan(start, width));
            if (count < config.min_support) continue;

            SideResult right, left;
            if (s[end].kind == SymbolKind::End) {
                right.boundary = true;
            } else {
                right = test_side(count, graph.subpath_count(s.subspan(start, width - 1)),
                                  graph.subpath_count(s.subspan(start, width + 1)), config);
            }
            if (s[start - 1].kind == SymbolKind::Begin) {
                left.boundary = true;
            } else {
                left = test_side(count, graph.subpath_count(s.subspan(start + 1, width - 1)),
                                 graph.subpath_count(s.subspan(start - 1, width + 1)), config);
            }
            if (right.boundary && left.boundary) continue;
            if (!(right.boundary || right.significant) || !(left.boundary || left.significant)) continue;

            double score = 0.0;
            if (!right.boundary) score = std::max(score, right.p_value);
            if (!left.boundary) score = std::max(score, left.p_value);

            if (!best || (score < best_score && !nearly_equal(score, best_score))) {
                best = Span{start, end};
                best_score = score;
            } else if (nearly_equal(score, best_score) && best->start == start && end > best->end) {
                best = Span{start, end};
                best_score = score;
            }
        }
    }
    result.chosen_span = best;
    if (best) result.chosen_p_value = best_score;
    return result;
}

}  // namespace

SignificanceScan scan_path(const Graph& graph, SentenceId path_id, const InductionConfig& config) {
    return scan(graph, path_id, config, true);
}

std::optional<Span> detect_significant_pattern(const Graph& graph, SentenceId path_id,
                                               const InductionConfig& config) {
    return scan(graph, path_id, config, false).chosen_span;
}

std::vector<Symbol> equivalence_candidates(const Graph& graph, Symbol left, Symbol right) {
    std::vector<Symbol> members;
    const auto& edges = graph.edges();
    for (auto it = edges.lower_bound({left, Symbol::begin()}); it != edges.end() && it->first.first == left; ++it) {
        const Symbol middle = it->first.second;
        if (middle.is_boundary()) continue;
        const Symbol trigram[] = {left, middle, right};
        if (graph.subpath_count(trigram) >= 1) members.push_back(middle);
    }
    if (members.empty())
        throw EmptyClassError("no symbol occurs between " + graph.name(left) + " and " + graph.name(right));
    return members;
}

const EquivalenceClass& extract_equivalence_class(const Graph& graph, Inventory& inventory, Symbol left,
                                                  Symbol right) {
    auto candidates = equivalence_candidates(graph, left, right);
    std::erase_if(candidates, [&](Symbol m) { return inventory.owner(m).has_value(); });
    if (candidates.empty())
        throw EmptyClassError("every symbol between " + graph.name(left) + " and " + graph.name(right) +
                              " already belongs to a class");
    return inventory.add_class(std::move(candidates));
}

std::vector<Pattern> InductionResult::active_patterns() const {
    std::vector<Pattern> out;
    for (const auto& p : inventory.patterns()) {
        if (p.active) out.push_back(p);
    }
    return out;
}

namespace {

// Turns a detected span into a pattern, rewires it everywhere and tries one
// generalization against the existing patterns. Returns whether any path
// changed.
bool introduce_pattern(InductionResult& state, SentenceId path_id, Span span, const InductionConfig& config) {
    auto& graph = state.graph;
    auto& inventory = state.inventory;
    const auto& s = graph.path(path_id).symbols;
    const Symbol left = s[span.start];
    const Symbol right = s[span.end - 1];

    std::optional<Symbol> slot;
    if (span.size() == 3) {
        const Symbol middle = s[span.start + 1];
        if (auto owner = inventory.owner(middle)) {
            slot = Symbol::klass(*owner);
        } else {
            slot = extract_equivalence_class(graph, inventory, left, right).symbol();
        }
    }

    std::vector<Symbol> surface{left};
    if (slot) surface.push_back(*slot);
    surface.push_back(right);
    if (auto existing = inventory.find_active_pattern(surface))
        return apply_pattern(graph, inventory, inventory.pattern(*existing)) > 0;

    const auto id = inventory.add_pattern(left, slot, right).id;
    apply_pattern(graph, inventory, inventory.pattern(id));

    const auto count = inventory.patterns().size();
    for (std::size_t i = 0; i < count; ++i) {
        const auto other = inventory.patterns()[i].id;
        if (other == id || !inventory.patterns()[i].active) continue;
        if (generalize_pair(inventory, &graph, id, other, config.sigma)) {
            ++state.merges;
            break;
        }
    }
    return true;
}

}  // namespace

InductionResult induce(const Corpus& corpus, const InductionConfig& config) {
    config.validate();
    if (corpus.size() == 0) throw EmptyCorpusError("cannot induce from an empty corpus");
    InductionResult state;
    state.graph = Graph::build(corpus);

    std::vector<SentenceId> ids;
    ids.reserve(state.graph.paths().size());
    for (const auto& [id, path] : state.graph.paths()) ids.push_back(id);

    while (state.passes < config.max_iterations) {
        ++state.passes;
        bool changed = false;
        for (auto id : ids) {
            auto span = detect_significant_pattern(state.graph, id, config);
            if (span && introduce_pattern(state, id, *span, config)) changed = true;
        }
        if (!changed) break;
    }
    return state;
}

}  // namespace madios
