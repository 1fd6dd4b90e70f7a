#include "madios/graph.hpp"

#include <algorithm>
#include <sstream>

#include "madios/error.hpp"

namespace madios {

std::size_t Graph::NgramHash::operator()(const NgramKey& k) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ k.size;
    for (std::size_t i = 0; i < k.size; ++i) {
        h ^= k.packed[i];
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

Graph::NgramKey Graph::make_key(std::span<const Symbol> symbols) {
    NgramKey key;
    key.size = static_cast<std::uint8_t>(symbols.size());
    for (std::size_t i = 0; i < symbols.size(); ++i) key.packed[i] = symbols[i].packed();
    return key;
}

void Graph::add_vertex(Symbol v) {
    if (incident_.emplace(v, 0).second) vertices_.push_back(v);
}

Graph Graph::build(const Corpus& corpus) {
    Graph g;
    for (const auto& sentence : corpus.sentences()) {
        SentencePath path;
        path.symbols.reserve(sentence.tokens.size() + 2);
        path.symbols.push_back(Symbol::begin());
        for (const auto& token : sentence.tokens) path.symbols.push_back(Symbol::word(g.lexicon_.intern(token)));
        path.symbols.push_back(Symbol::end());

        // Vertex insertion follows the two membership checks per link.
        for (std::size_t n = 0; n + 1 < path.symbols.size(); ++n) {
            g.add_vertex(path.symbols[n]);
            g.add_vertex(path.symbols[n + 1]);
        }
        path.nodes.reserve(path.symbols.size());
        for (auto s : path.symbols) path.nodes.push_back({s, {}});
        auto [it, inserted] = g.paths_.emplace(sentence.id, std::move(path));
        g.attach_path(sentence.id, it->second);
    }
    return g;
}

void Graph::attach_path(SentenceId id, SentencePath& path) {
    const auto& s = path.symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        edges_[{s[i], s[i + 1]}].push_back({id, static_cast<std::uint32_t>(i), path.generation});
        ++incident_[s[i]];
        ++incident_[s[i + 1]];
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t n = 1; n <= kCachedOrder && i + n <= s.size(); ++n)
            ++ngrams_[make_key(std::span(s).subspan(i, n))];
    }
}

void Graph::detach_path(SentenceId id, const SentencePath& path) {
    const auto& s = path.symbols;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        auto it = edges_.find({s[i], s[i + 1]});
        auto& labels = it->second;
        EdgeLabel target{id, static_cast<std::uint32_t>(i), path.generation};
        labels.erase(std::find(labels.begin(), labels.end(), target));
        if (labels.empty()) edges_.erase(it);
        --incident_[s[i]];
        --incident_[s[i + 1]];
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t n = 1; n <= kCachedOrder && i + n <= s.size(); ++n) {
            auto it = ngrams_.find(make_key(std::span(s).subspan(i, n)));
            if (--it->second == 0) ngrams_.erase(it);
        }
    }
}

const SentencePath& Graph::path(SentenceId id) const {
    auto it = paths_.find(id);
    if (it == paths_.end()) throw ArgumentError("no path for sentence " + std::to_string(id));
    return it->second;
}

std::size_t Graph::subpath_count(std::span<const Symbol> symbols) const {
    if (symbols.empty()) throw ArgumentError("subpath_count needs at least one symbol");
    if (symbols.size() <= kCachedOrder) {
        auto it = ngrams_.find(make_key(symbols));
        return it == ngrams_.end() ? 0 : it->second;
    }
    std::size_t count = 0;
    for (const auto& [id, path] : paths_) {
        const auto& s = path.symbols;
        if (s.size() < symbols.size()) continue;
        for (std::size_t i = 0; i + symbols.size() <= s.size(); ++i) {
            if (std::equal(symbols.begin(), symbols.end(), s.begin() + static_cast<std::ptrdiff_t>(i))) ++count;
        }
    }
    return count;
}

bool Graph::is_active(Symbol v) const { return incident_labels(v) > 0; }

std::size_t Graph::incident_labels(Symbol v) const {
    auto it = incident_.find(v);
    return it == incident_.end() ? 0 : it->second;
}

const std::vector<EdgeLabel>* Graph::labels(Symbol from, Symbol to) const {
    auto it = edges_.find({from, to});
    return it == edges_.end() ? nullptr : &it->second;
}

std::size_t Graph::total_labels() const {
    std::size_t n = 0;
    for (const auto& [key, labels] : edges_) n += labels.size();
    return n;
}

void Graph::rewire(std::span<const Occurrence> occurrences, Symbol new_symbol, const SpanPredicate& matches) {
    if (occurrences.empty()) return;
    if (!new_symbol.is_pattern()) throw RewireError("rewire target must be a pattern symbol");

    auto describe = [](const Occurrence& o) {
        return "sentence " + std::to_string(o.sentence_id) + " span [" + std::to_string(o.start) + "," +
               std::to_string(o.end) + ")";
    };

    // Validate everything before touching the graph.
    std::map<SentenceId, std::vector<Occurrence>> by_path;
    for (const auto& o : occurrences) {
        auto it = paths_.find(o.sentence_id);
        if (it == paths_.end()) throw RewireError("unknown " + describe(o));
        const auto& s = it->second.symbols;
        if (o.start < 1 || o.start >= o.end || o.end > s.size() - 1)
            throw RewireError("out-of-range " + describe(o));
        auto span = std::span(s).subspan(o.start, o.end - o.start);
        if (matches && !matches(span)) throw RewireError("pattern mismatch at " + describe(o));
        by_path[o.sentence_id].push_back(o);
    }
    for (auto& [id, list] : by_path) {
        std::sort(list.begin(), list.end());
        for (std::size_t i = 1; i < list.size(); ++i) {
            if (list[i].start < list[i - 1].end) throw RewireError("overlapping " + describe(list[i]));
        }
    }

    add_vertex(new_symbol);
    for (auto& [id, list] : by_path) {
        auto& path = paths_.at(id);
        detach_path(id, path);
        for (auto it = list.rbegin(); it != list.rend(); ++it) {
            auto first = static_cast<std::ptrdiff_t>(it->start);
            auto last = static_cast<std::ptrdiff_t>(it->end);
            Derivation node{new_symbol, {}};
            node.children.assign(std::make_move_iterator(path.nodes.begin() + first),
                                 std::make_move_iterator(path.nodes.begin() + last));
            path.nodes.erase(path.nodes.begin() + first + 1, path.nodes.begin() + last);
            path.nodes[static_cast<std::size_t>(first)] = std::move(node);
            path.symbols.erase(path.symbols.begin() + first + 1, path.symbols.begin() + last);
            path.symbols[static_cast<std::size_t>(first)] = new_symbol;
        }
        ++path.generation;
        attach_path(id, path);
    }
}

void Graph::relabel(SentenceId id, std::size_t position, Symbol new_symbol) {
    auto it = paths_.find(id);
    if (it == paths_.end()) throw RewireError("unknown sentence " + std::to_string(id));
    auto& path = it->second;
    if (position < 1 || position + 1 >= path.symbols.size() || !path.symbols[position].is_pattern() ||
        !new_symbol.is_pattern()) {
        throw RewireError("cannot relabel sentence " + std::to_string(id) + " position " + std::to_string(position));
    }
    add_vertex(new_symbol);
    detach_path(id, path);
    path.symbols[position] = new_symbol;
    path.nodes[position].symbol = new_symbol;
    ++path.generation;
    attach_path(id, path);
}

std::string Graph::dump() const {
    std::ostringstream out;
    for (const auto& [key, labels] : edges_) {
        out << name(key.first) << " -> " << name(key.second) << " [";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) out << ", ";
            out << labels[i].sentence_id << ':' << labels[i].link_id;
            if (labels[i].generation) out << '@' << labels[i].generation;
        }
        out << "]\n";
    }
    return out.str();
}

namespace {
void collect_leaves(const Derivation& d, std::vector<Symbol>& out) {
    if (d.children.empty()) {
        if (!d.symbol.is_boundary()) out.push_back(d.symbol);
        return;
    }
    for (const auto& c : d.children) collect_leaves(c, out);
}
}  // namespace

std::vector<Symbol> derivation_leaves(std::span<const Derivation> nodes) {
    std::vector<Symbol> out;
    for (const auto& n : nodes) collect_leaves(n, out);
    return out;
}

}  // namespace madios
