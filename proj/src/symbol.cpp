#include "madios/symbol.hpp"

namespace madios {

std::uint32_t Lexicon::intern(std::string_view word) {
    auto it = ids_.find(std::string(word));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(words_.size());
    words_.emplace_back(word);
    ids_.emplace(words_.back(), id);
    return id;
}

std::uint32_t Lexicon::find(std::string_view word) const {
    auto it = ids_.find(std::string(word));
    return it == ids_.end() ? Symbol::kUnknownWord : it->second;
}

std::string symbol_name(const Symbol& s, const Lexicon& lexicon) {
    switch (s.kind) {
        case SymbolKind::Begin: return "BEGIN";
        case SymbolKind::End: return "END";
        case SymbolKind::Word:
            return s.id < lexicon.size() ? lexicon.word(s.id) : std::string("<unk>");
        case SymbolKind::Pattern: return "Pattern_" + std::to_string(s.id);
        case SymbolKind::Class: return "E_" + std::to_string(s.id);
        case SymbolKind::Sentence: return s.id == 0 ? std::string("S") : "S_" + std::to_string(s.id);
        case SymbolKind::Root: return "ROOT";
    }
    return "?";
}

}  // namespace madios
