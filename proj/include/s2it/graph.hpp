#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "s2it/types.hpp"

namespace s2it {

// Surface word a dependency label collapses to. `skip` edges stay in the tree
// but are left out of adjacency and every rendering.
enum class RelationWord { modify, depend, skip };

std::string_view to_string(RelationWord w);

// label -> modify|depend|skip. Lookup tries the full label, then the part
// before ':' ("nmod:poss" -> "nmod"), then falls back to `depend`.
class RelationMap {
 public:
  RelationMap();  // built-in defaults
  explicit RelationMap(std::map<std::string, RelationWord> entries)
      : entries_(std::move(entries)) {}

  // JSON object {"amod": "modify", "punct": "skip", ...}.
  static RelationMap from_json_text(std::string_view text);
  static RelationMap load(const std::filesystem::path& path);

  RelationWord classify(std::string_view label) const;
  const std::map<std::string, RelationWord>& entries() const { return entries_; }

 private:
  std::map<std::string, RelationWord> entries_;
};

// An aligned sentence: tokens, the full dependency tree and the gold quads,
// plus the undirected adjacency over retained (non-skip) edges.
class SentenceGraph {
 public:
  SentenceGraph() = default;
  SentenceGraph(AnnotatedSentence sentence, const RelationMap& relations = RelationMap{});

  const AnnotatedSentence& sentence() const { return sentence_; }
  const std::string& id() const { return sentence_.id; }
  const std::vector<Token>& tokens() const { return sentence_.tokens; }
  const std::vector<DependencyEdge>& edges() const { return sentence_.edges; }
  const std::vector<SentimentQuad>& quads() const { return sentence_.quads; }
  std::size_t size() const { return sentence_.tokens.size(); }
  bool has_parse() const { return !sentence_.edges.empty(); }

  // Relation word of edges()[i].
  RelationWord word(std::size_t edge) const { return words_[edge]; }
  bool retained(std::size_t edge) const { return words_[edge] != RelationWord::skip; }

  // Token indices are 1-based; index 0 (root) is never adjacent to anything.
  bool adjacent(int i, int j) const;
  const std::string& surface(int index) const { return sentence_.tokens[index - 1].surface; }

 private:
  AnnotatedSentence sentence_;
  std::vector<RelationWord> words_;
  std::vector<bool> adjacency_;  // n*n row-major, 0-based
};

// Throws DataError unless every token has exactly one head and heads are in range.
void check_single_head(const std::vector<DependencyEdge>& edges, std::size_t n);

}  // namespace s2it
