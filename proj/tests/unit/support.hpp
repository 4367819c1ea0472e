#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "s2it/corpus.hpp"
#include "s2it/graph.hpp"

namespace s2it::testing {

inline std::filesystem::path data_dir() { return S2IT_TEST_DATA; }

inline std::vector<SentenceGraph> fixture_graphs() {
  auto sentences = load_acos(data_dir() / "fixture.tsv", CategorySet{});
  return align_corpus(sentences, load_conllu(data_dir() / "fixture.conllu"));
}

inline const SentenceGraph& worked_graph() {
  static const std::vector<SentenceGraph> graphs = fixture_graphs();
  return graphs.front();
}

// Random dependency tree over n tokens "w1".."wn": a random visiting order,
// each node after the first attached to some earlier-visited node.
inline SentenceGraph random_tree(std::mt19937& rng, int n, bool with_quads = false) {
  static const std::vector<std::string> labels{"amod", "nsubj", "punct", "det", "conj", "obj", "advmod", "cc"};
  AnnotatedSentence s;
  s.id = "rand";
  for (int i = 1; i <= n; ++i) s.tokens.push_back({i, "w" + std::to_string(i)});
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<DependencyEdge> edges(n);
  for (int k = 0; k < n; ++k) {
    int dep = order[k];
    int head = k == 0 ? 0 : order[std::uniform_int_distribution<int>(0, k - 1)(rng)];
    std::string label = k == 0 ? "root" : labels[std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng)];
    edges[dep - 1] = {head, dep, label};
  }
  s.edges = edges;
  if (with_quads) {
    std::uniform_int_distribution<int> pos(1, n);
    int count = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int q = 0; q < count; ++q) {
      auto span = [&]() -> ElementSpan {
        if (rng() % 4 == 0) return std::nullopt;
        int b = pos(rng);
        int e = std::min(n, b + static_cast<int>(rng() % 3));
        return Span{b, e};
      };
      SentimentQuad quad;
      quad.aspect = span();
      quad.opinion = span();
      quad.raw_category = "FOOD#QUALITY";
      quad.category = "food quality";
      quad.sentiment = static_cast<Sentiment>(rng() % 3);
      s.quads.push_back(quad);
    }
  }
  return SentenceGraph(std::move(s));
}

}  // namespace s2it::testing
