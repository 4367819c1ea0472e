#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "s2it/graph.hpp"
#include "s2it/types.hpp"

namespace s2it {

// Closed set of raw category labels ("SERVICE#GENERAL"). An open set accepts
// any label.
class CategorySet {
 public:
  CategorySet() = default;  // open
  explicit CategorySet(std::set<std::string> labels) : labels_(std::move(labels)), closed_(true) {}

  // One raw label per line; blank lines and '#'-prefixed comments ignored.
  static CategorySet load(const std::filesystem::path& path);

  bool closed() const { return closed_; }
  bool contains(std::string_view raw) const;
  const std::set<std::string>& labels() const { return labels_; }

 private:
  std::set<std::string> labels_;
  bool closed_ = false;
};

// "SERVICE#GENERAL" -> "service general".
std::string normalize_category(std::string_view raw);

// File sentiment index -> polarity. Defaults to 0/1/2 = negative/neutral/positive.
struct PolarityMap {
  std::array<Sentiment, 3> by_index{Sentiment::negative, Sentiment::neutral, Sentiment::positive};

  std::optional<Sentiment> at(int index) const;
  int index_of(Sentiment s) const;
};

AnnotatedSentence parse_acos_line(std::string_view line, const CategorySet& categories,
                                  const PolarityMap& polarity = {}, std::size_t line_no = 0);

// Inverse of parse_acos_line for well-formed sentences.
std::string serialize_acos_line(const AnnotatedSentence& sentence, const PolarityMap& polarity = {});

// Reads every non-blank line. Sentence ids are "<file stem>:<line>".
std::vector<AnnotatedSentence> load_acos(const std::filesystem::path& path,
                                         const CategorySet& categories,
                                         const PolarityMap& polarity = {});

std::vector<ParsedSentence> parse_conllu(std::istream& in);
std::vector<ParsedSentence> load_conllu(const std::filesystem::path& path);

struct AlignOptions {
  bool case_insensitive = false;
};

SentenceGraph align(const AnnotatedSentence& sentence, const ParsedSentence& parse,
                    const RelationMap& relations = RelationMap{}, const AlignOptions& options = {});

// Aligns sentence i with parse i for the whole corpus; sizes must match.
std::vector<SentenceGraph> align_corpus(const std::vector<AnnotatedSentence>& sentences,
                                        const std::vector<ParsedSentence>& parses,
                                        const RelationMap& relations = RelationMap{},
                                        const AlignOptions& options = {});

// Wraps unparsed sentences as graphs without edges (syntax-free prompts only).
std::vector<SentenceGraph> unparsed_corpus(const std::vector<AnnotatedSentence>& sentences);

struct CorpusStats {
  std::size_t sentence_count = 0;
  std::size_t quad_count = 0;
  std::size_t implicit_aspect_count = 0;
  std::size_t implicit_opinion_count = 0;
  std::map<std::string, std::size_t> category_histogram;
  std::map<std::string, std::size_t> sentiment_histogram;
};

CorpusStats corpus_stats(const std::vector<AnnotatedSentence>& corpus);
CorpusStats corpus_stats(const std::vector<SentenceGraph>& corpus);

// Canonical corpus file: one JSON object per sentence (tokens, quads, edges).
std::string to_canonical_json(const AnnotatedSentence& sentence);
AnnotatedSentence from_canonical_json(std::string_view line, std::size_t line_no = 0);
void write_canonical(const std::vector<SentenceGraph>& corpus, const std::filesystem::path& path);
std::vector<SentenceGraph> load_canonical(const std::filesystem::path& path,
                                          const RelationMap& relations = RelationMap{});

}  // namespace s2it
