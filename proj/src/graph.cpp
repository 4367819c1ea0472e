#include "s2it/graph.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace s2it {

std::string_view to_string(RelationWord w) {
  switch (w) {
    case RelationWord::modify: return "modify";
    case RelationWord::depend: return "depend";
    case RelationWord::skip: return "skip";
  }
  return "depend";
}

RelationMap::RelationMap() {
  for (const char* label : {"amod", "advmod", "nmod", "nummod", "appos", "acl", "advcl", "det", "compound"})
    entries_[label] = RelationWord::modify;
  entries_["punct"] = RelationWord::skip;
}

RelationMap RelationMap::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("relation map: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("relation map: expected a JSON object of label -> word");
  std::map<std::string, RelationWord> entries;
  for (const auto& [label, value] : doc.items()) {
    if (!value.is_string()) throw DataError("relation map: value for '" + label + "' is not a string");
    const auto word = value.get<std::string>();
    if (word == "modify")
      entries[label] = RelationWord::modify;
    else if (word == "depend")
      entries[label] = RelationWord::depend;
    else if (word == "skip")
      entries[label] = RelationWord::skip;
    else
      throw DataError("relation map: '" + label + "' maps to '" + word + "', expected modify|depend|skip");
  }
  return RelationMap(std::move(entries));
}

RelationMap RelationMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open relation map " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

RelationWord RelationMap::classify(std::string_view label) const {
  if (auto it = entries_.find(std::string(label)); it != entries_.end()) return it->second;
  if (auto colon = label.find(':'); colon != std::string_view::npos) {
    if (auto it = entries_.find(std::string(label.substr(0, colon))); it != entries_.end()) return it->second;
  }
  return RelationWord::depend;
}

void check_single_head(const std::vector<DependencyEdge>& edges, std::size_t n) {
  std::vector<int> heads(n + 1, 0);
  for (const auto& e : edges) {
    if (e.dependent < 1 || static_cast<std::size_t>(e.dependent) > n)
      throw DataError("edge dependent " + std::to_string(e.dependent) + " outside 1.." + std::to_string(n));
    if (e.head < 0 || static_cast<std::size_t>(e.head) > n)
      throw DataError("edge head " + std::to_string(e.head) + " outside 0.." + std::to_string(n));
    if (e.head == e.dependent) throw DataError("token " + std::to_string(e.dependent) + " heads itself");
    if (++heads[e.dependent] > 1) throw DataError("token " + std::to_string(e.dependent) + " has two heads");
  }
  for (std::size_t i = 1; i <= n; ++i)
    if (heads[i] == 0) throw DataError("token " + std::to_string(i) + " has no head");
}

SentenceGraph::SentenceGraph(AnnotatedSentence sentence, const RelationMap& relations)
    : sentence_(std::move(sentence)) {
  const std::size_t n = sentence_.tokens.size();
  if (!sentence_.edges.empty()) check_single_head(sentence_.edges, n);
  adjacency_.assign(n * n, false);
  words_.reserve(sentence_.edges.size());
  for (const auto& e : sentence_.edges) {
    words_.push_back(relations.classify(e.label));
    if (words_.back() == RelationWord::skip || e.head == 0) continue;
    const std::size_t h = e.head - 1, d = e.dependent - 1;
    adjacency_[h * n + d] = true;
    adjacency_[d * n + h] = true;
  }
}

bool SentenceGraph::adjacent(int i, int j) const {
  const auto n = static_cast<int>(size());
  if (i < 1 || j < 1 || i > n || j > n) return false;
  return adjacency_[(i - 1) * n + (j - 1)];
}

}  // namespace s2it
