#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "s2it/graph.hpp"

namespace s2it {

// How dependency structure is described in prompts. `none` drops the syntax
// blocks entirely (the no-syntax ablation arm).
enum class SyntaxStyle { natural_language, symbol, none };

std::string_view to_string(SyntaxStyle s);
SyntaxStyle parse_syntax_style(std::string_view text);  // "nl" | "symbol" | "none"

// Whole-tree description.
//   natural_language: "root depend service | service modify ok | ..." with one
//     clause per retained edge, ordered by dependent position.
//   symbol: "(service (ok) (bathroom (but) (unfriendly) (filthy)))".
// Returns "" for an empty graph or style none.
std::string serialize_global(const SentenceGraph& graph, SyntaxStyle style);

// Tokens within `hops` adjacency steps of any span token, excluding the span
// itself, in sentence order. Implicit spans have no neighbors.
std::vector<int> neighbors(const SentenceGraph& graph, const ElementSpan& span, int hops);

// "aspect: bathroom, which is connected to (service, but, unfriendly, filthy) within one hop."
std::string serialize_subgraph(const SentenceGraph& graph, Role role, const ElementSpan& span,
                               int hops, SyntaxStyle style = SyntaxStyle::natural_language);

// Same, for an element that could not be anchored to sentence tokens.
std::string serialize_unanchored(Role role, std::string_view surface,
                                SyntaxStyle style = SyntaxStyle::natural_language);

}  // namespace s2it
