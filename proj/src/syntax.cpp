#include "s2it/syntax.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace s2it {

std::string_view to_string(SyntaxStyle s) {
  switch (s) {
    case SyntaxStyle::natural_language: return "nl";
    case SyntaxStyle::symbol: return "symbol";
    case SyntaxStyle::none: return "none";
  }
  return "nl";
}

SyntaxStyle parse_syntax_style(std::string_view text) {
  if (text == "nl" || text == "nl-syn") return SyntaxStyle::natural_language;
  if (text == "symbol" || text == "symbol-syn") return SyntaxStyle::symbol;
  if (text == "none") return SyntaxStyle::none;
  throw ContractError("unknown syntax style '" + std::string(text) + "' (expected nl|symbol|none)");
}

namespace {

// Retained edge indices ordered by dependent position.
std::vector<std::size_t> clause_order(const SentenceGraph& graph) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < graph.edges().size(); ++i)
    if (graph.retained(i)) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return graph.edges()[a].dependent < graph.edges()[b].dependent;
  });
  return order;
}

void render_bracketed(const SentenceGraph& graph, const std::vector<std::vector<int>>& children, int node,
                      std::string& out) {
  out += '(';
  out += graph.surface(node);
  for (int child : children[node]) {
    out += ' ';
    render_bracketed(graph, children, child, out);
  }
  out += ')';
}

std::string hop_phrase(int hops) {
  return hops == 1 ? "within one hop." : "within " + std::to_string(hops) + " hops.";
}

}  // namespace

std::string serialize_global(const SentenceGraph& graph, SyntaxStyle style) {
  if (graph.size() == 0 || style == SyntaxStyle::none) return {};
  const auto order = clause_order(graph);

  if (style == SyntaxStyle::natural_language) {
    std::string out;
    for (std::size_t i : order) {
      const auto& e = graph.edges()[i];
      if (!out.empty()) out += " | ";
      if (e.head == 0) {
        out += "root depend ";
      } else {
        out += graph.surface(e.head);
        out += ' ';
        out += to_string(graph.word(i));
        out += ' ';
      }
      out += graph.surface(e.dependent);
    }
    return out;
  }

  std::vector<std::vector<int>> children(graph.size() + 1);
  std::vector<int> roots;
  for (std::size_t i : order) {
    const auto& e = graph.edges()[i];
    (e.head == 0 ? roots : children[e.head]).push_back(e.dependent);
  }
  std::string out;
  for (int r : roots) {
    if (!out.empty()) out += ' ';
    render_bracketed(graph, children, r, out);
  }
  return out;
}

std::vector<int> neighbors(const SentenceGraph& graph, const ElementSpan& span, int hops) {
  if (hops < 1) throw ContractError("neighbors: hops must be positive, got " + std::to_string(hops));
  if (!span) return {};
  const int n = static_cast<int>(graph.size());
  if (span->begin < 1 || span->end > n || span->begin > span->end)
    throw ContractError("neighbors: span " + std::to_string(span->begin) + ".." + std::to_string(span->end) +
                        " outside sentence of " + std::to_string(n) + " tokens");

  std::vector<int> depth(n + 1, -1);
  std::deque<int> frontier;
  for (int t = span->begin; t <= span->end; ++t) {
    depth[t] = 0;
    frontier.push_back(t);
  }
  while (!frontier.empty()) {
    int u = frontier.front();
    frontier.pop_front();
    if (depth[u] == hops) continue;
    for (int v = 1; v <= n; ++v) {
      if (depth[v] < 0 && graph.adjacent(u, v)) {
        depth[v] = depth[u] + 1;
        frontier.push_back(v);
      }
    }
  }
  std::vector<int> out;
  for (int v = 1; v <= n; ++v)
    if (depth[v] > 0) out.push_back(v);
  return out;
}

std::string serialize_subgraph(const SentenceGraph& graph, Role role, const ElementSpan& span, int hops,
                               SyntaxStyle style) {
  const auto near = neighbors(graph, span, hops);
  const std::string surface = graph.sentence().span_text(span);
  std::string out(to_string(role));
  out += ": ";

  if (style == SyntaxStyle::symbol) {
    out += '(';
    out += surface;
    for (int v : near) out += " (" + graph.surface(v) + ")";
    out += ')';
    return out;
  }

  out += surface;
  if (near.empty()) {
    out += ", which has no syntactic neighbors.";
    return out;
  }
  out += ", which is connected to (";
  for (std::size_t i = 0; i < near.size(); ++i) {
    if (i) out += ", ";
    out += graph.surface(near[i]);
  }
  out += ") ";
  out += hop_phrase(hops);
  return out;
}

std::string serialize_unanchored(Role role, std::string_view surface, SyntaxStyle style) {
  std::string out(to_string(role));
  out += ": ";
  if (style == SyntaxStyle::symbol) return out + "(" + std::string(surface) + ")";
  return out + std::string(surface) + ", which has no syntactic neighbors.";
}

}  // namespace s2it
