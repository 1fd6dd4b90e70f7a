#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace madios {

enum class SymbolKind : std::uint8_t {
    Begin,
    End,
    Word,
    Pattern,
    Class,
    Sentence,  // grammar-only: S rule heads
    Root,      // grammar-only: ROOT
};

// A vertex of the corpus graph or a grammar symbol. Words are interned in a
// Lexicon; patterns and classes carry their registry id.
struct Symbol {
    SymbolKind kind = SymbolKind::Word;
    std::uint32_t id = 0;

    static constexpr std::uint32_t kUnknownWord = 0xffffffffu;

    static constexpr Symbol begin() { return {SymbolKind::Begin, 0}; }
    static constexpr Symbol end() { return {SymbolKind::End, 0}; }
    static constexpr Symbol root() { return {SymbolKind::Root, 0}; }
    static constexpr Symbol word(std::uint32_t id) { return {SymbolKind::Word, id}; }
    static constexpr Symbol pattern(std::uint32_t id) { return {SymbolKind::Pattern, id}; }
    static constexpr Symbol klass(std::uint32_t id) { return {SymbolKind::Class, id}; }
    static constexpr Symbol sentence(std::uint32_t id) { return {SymbolKind::Sentence, id}; }

    constexpr bool is_boundary() const { return kind == SymbolKind::Begin || kind == SymbolKind::End; }
    constexpr bool is_word() const { return kind == SymbolKind::Word; }
    constexpr bool is_pattern() const { return kind == SymbolKind::Pattern; }
    constexpr bool is_class() const { return kind == SymbolKind::Class; }

    friend constexpr auto operator<=>(const Symbol&, const Symbol&) = default;

    std::uint32_t packed() const { return (static_cast<std::uint32_t>(kind) << 29) | (id & 0x1fffffffu); }
};

struct SymbolHash {
    std::size_t operator()(const Symbol& s) const noexcept {
        return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(s.kind) << 32) | s.id);
    }
};

// Bidirectional word <-> id table. Ids are assigned in first-seen order.
class Lexicon {
public:
    std::uint32_t intern(std::string_view word);
    // Returns Symbol::kUnknownWord when absent.
    std::uint32_t find(std::string_view word) const;
    const std::string& word(std::uint32_t id) const { return words_.at(id); }
    std::size_t size() const { return words_.size(); }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::uint32_t> ids_;
};

// Display name: the word itself, Pattern_<id>, E_<id>, S / S_<id>, ROOT,
// BEGIN, END.
std::string symbol_name(const Symbol& s, const Lexicon& lexicon);

}  // namespace madios
