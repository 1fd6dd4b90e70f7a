#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "madios/corpus.hpp"
#include "madios/symbol.hpp"

namespace madios {

// One traversal of an edge by a sentence path. link_id is the edge's position
// within the path; generation counts how many times the path was rewired, so
// (sentence_id, generation, link_id) is unique across the graph.
struct EdgeLabel {
    SentenceId sentence_id = 0;
    std::uint32_t link_id = 0;
    std::uint32_t generation = 0;

    friend auto operator<=>(const EdgeLabel&, const EdgeLabel&) = default;
};

// How a path symbol was produced: a leaf for corpus words and boundaries, or
// a pattern node whose children are the symbols it replaced.
struct Derivation {
    Symbol symbol;
    std::vector<Derivation> children;

    friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct SentencePath {
    std::vector<Symbol> symbols;  // BEGIN ... END
    std::vector<Derivation> nodes;  // parallel to symbols
    std::uint32_t generation = 0;
};

// A half-open span [start, end) of path positions in one sentence.
struct Occurrence {
    SentenceId sentence_id = 0;
    std::size_t start = 0;
    std::size_t end = 0;

    friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

using SpanPredicate = std::function<bool(std::span<const Symbol>)>;

// Simple directed graph over symbols; parallel traversals are kept as edge
// labels rather than parallel edges.
class Graph {
public:
    using EdgeKey = std::pair<Symbol, Symbol>;

    static Graph build(const Corpus& corpus);

    const Lexicon& lexicon() const { return lexicon_; }

    // Occurrences of `symbols` as a contiguous run, summed over all paths.
    std::size_t subpath_count(std::span<const Symbol> symbols) const;

    const std::map<SentenceId, SentencePath>& paths() const { return paths_; }
    const SentencePath& path(SentenceId id) const;
    bool has_path(SentenceId id) const { return paths_.count(id) != 0; }

    // Vertices in insertion order. Inactive vertices (no incident labels) are
    // kept so ids stay stable.
    const std::vector<Symbol>& vertices() const { return vertices_; }
    bool has_vertex(Symbol v) const { return incident_.count(v) != 0; }
    bool is_active(Symbol v) const;
    std::size_t incident_labels(Symbol v) const;

    const std::map<EdgeKey, std::vector<EdgeLabel>>& edges() const { return edges_; }
    const std::vector<EdgeLabel>* labels(Symbol from, Symbol to) const;
    std::size_t total_labels() const;

    // Collapses each occurrence span into `new_symbol` (a pattern). The new
    // path node keeps the replaced nodes as children. `matches`, if given,
    // must accept every span. Throws RewireError naming the offending span.
    void rewire(std::span<const Occurrence> occurrences, Symbol new_symbol, const SpanPredicate& matches = {});

    // Renames the pattern at `position` to `new_symbol`, keeping its children.
    void relabel(SentenceId id, std::size_t position, Symbol new_symbol);

    // `from -> to [sid:lid, ...]` per edge; rewired labels print as sid:lid@gen.
    std::string dump() const;

    std::string name(Symbol s) const { return symbol_name(s, lexicon_); }

private:
    struct NgramKey {
        std::array<std::uint32_t, 4> packed{};
        std::uint8_t size = 0;
        friend bool operator==(const NgramKey&, const NgramKey&) = default;
    };
    struct NgramHash {
        std::size_t operator()(const NgramKey& k) const noexcept;
    };
    static constexpr std::size_t kCachedOrder = 4;

    static NgramKey make_key(std::span<const Symbol> symbols);
    void add_vertex(Symbol v);
    void attach_path(SentenceId id, SentencePath& path);
    void detach_path(SentenceId id, const SentencePath& path);

    Lexicon lexicon_;
    std::vector<Symbol> vertices_;
    std::unordered_map<Symbol, std::size_t, SymbolHash> incident_;
    std::map<EdgeKey, std::vector<EdgeLabel>> edges_;
    std::map<SentenceId, SentencePath> paths_;
    std::unordered_map<NgramKey, std::size_t, NgramHash> ngrams_;
};

// Leaves of a derivation forest, BEGIN/END excluded.
std::vector<Symbol> derivation_leaves(std::span<const Derivation> nodes);

}  // namespace madios
