#include "s2it/corpus.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace s2it {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::optional<int> to_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// ACOS spans are 0-based, end-exclusive; "-1,-1" is implicit.
ElementSpan parse_span(std::string_view field, std::size_t n, std::string_view quad, std::size_t line_no) {
  auto parts = split(field, ',');
  std::optional<int> b, e;
  if (parts.size() == 2) {
    b = to_int(parts[0]);
    e = to_int(parts[1]);
  }
  if (!b || !e) throw DataError("malformed span '" + std::string(field) + "' in quad '" + std::string(quad) + "'", line_no);
  if (*b == -1 && *e == -1) return std::nullopt;
  if (*b < 0 || *e <= *b || static_cast<std::size_t>(*e) > n)
    throw DataError("span '" + std::string(field) + "' out of range for " + std::to_string(n) + " tokens in quad '" +
                        std::string(quad) + "'",
                    line_no);
  return Span{*b + 1, *e};
}

std::string format_span(const ElementSpan& span) {
  if (!span) return "-1,-1";
  return std::to_string(span->begin - 1) + "," + std::to_string(span->end);
}

nlohmann::ordered_json span_json(const ElementSpan& span) {
  if (!span) return nullptr;
  return nlohmann::ordered_json::array({span->begin, span->end});
}

ElementSpan span_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return Span{j.at(0).get<int>(), j.at(1).get<int>()};
}

}  // namespace

bool CategorySet::contains(std::string_view raw) const {
  return !closed_ || labels_.count(std::string(raw)) > 0;
}

CategorySet CategorySet::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open category set " + path.string());
  std::set<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto l = chomp(line);
    while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.remove_suffix(1);
    while (!l.empty() && (l.front() == ' ' || l.front() == '\t')) l.remove_prefix(1);
    if (l.empty() || l.front() == '#') continue;
    labels.emplace(l);
  }
  return CategorySet(std::move(labels));
}

std::string normalize_category(std::string_view raw) {
  std::string out = ascii_lower(raw);
  for (auto& c : out)
    if (c == '#') c = ' ';
  return out;
}

std::optional<Sentiment> PolarityMap::at(int index) const {
  if (index < 0 || index >= static_cast<int>(by_index.size())) return std::nullopt;
  return by_index[index];
}

int PolarityMap::index_of(Sentiment s) const {
  for (std::size_t i = 0; i < by_index.size(); ++i)
    if (by_index[i] == s) return static_cast<int>(i);
  throw ContractError("polarity map has no index for " + std::string(to_string(s)));
}

AnnotatedSentence parse_acos_line(std::string_view line, const CategorySet& categories, const PolarityMap& polarity,
                                  std::size_t line_no) {
  line = chomp(line);
  auto fields = split(line, '\t');
  AnnotatedSentence out;
  if (fields[0].empty()) throw DataError("empty sentence field", line_no);
  int index = 0;
  for (auto surface : split(fields[0], ' ')) {
    if (surface.empty()) throw DataError("empty token (double space) in sentence", line_no);
    out.tokens.push_back({++index, std::string(surface)});
  }
  const std::size_t n = out.tokens.size();
  for (std::size_t f = 1; f < fields.size(); ++f) {
    auto quad = fields[f];
    if (quad.empty()) continue;
    auto parts = split(quad, ' ');
    if (parts.size() != 4) throw DataError("malformed quad field '" + std::string(quad) + "'", line_no);
    SentimentQuad q;
    q.aspect = parse_span(parts[0], n, quad, line_no);
    q.opinion = parse_span(parts[3], n, quad, line_no);
    q.raw_category = std::string(parts[1]);
    if (!categories.contains(q.raw_category)) {
      std::string known;
      for (const auto& c : categories.labels()) known += (known.empty() ? "" : ", ") + c;
      throw DataError("unknown category '" + q.raw_category + "' (known: " + known + ")", line_no);
    }
    q.category = normalize_category(q.raw_category);
    auto idx = to_int(parts[2]);
    if (!idx) throw DataError("malformed sentiment index in quad '" + std::string(quad) + "'", line_no);
    auto s = polarity.at(*idx);
    if (!s) throw DataError("sentiment index " + std::string(parts[2]) + " out of range in quad '" + std::string(quad) + "'", line_no);
    q.sentiment = *s;
    out.quads.push_back(std::move(q));
  }
  return out;
}

std::string serialize_acos_line(const AnnotatedSentence& sentence, const PolarityMap& polarity) {
  std::string out = sentence.text();
  for (const auto& q : sentence.quads) {
    out += '\t';
    out += format_span(q.aspect);
    out += ' ';
    out += q.raw_category;
    out += ' ';
    out += std::to_string(polarity.index_of(q.sentiment));
    out += ' ';
    out += format_span(q.opinion);
  }
  return out;
}

std::vector<AnnotatedSentence> load_acos(const std::filesystem::path& path, const CategorySet& categories,
                                         const PolarityMap& polarity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<AnnotatedSentence> out;
  const std::string stem = path.stem().string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (chomp(line).empty()) continue;
    try {
      out.push_back(parse_acos_line(line, categories, polarity, line_no));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    out.back().id = stem + ":" + std::to_string(line_no);
  }
  return out;
}

std::vector<ParsedSentence> parse_conllu(std::istream& in) {
  std::vector<ParsedSentence> out;
  ParsedSentence current;
  std::vector<std::size_t> head_lines;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    const auto n = static_cast<int>(current.tokens.size());
    for (std::size_t i = 0; i < current.edges.size(); ++i)
      if (current.edges[i].head > n)
        throw DataError("HEAD " + std::to_string(current.edges[i].head) + " references a missing token (sentence has " +
                            std::to_string(n) + ")",
                        head_lines[i]);
    out.push_back(std::move(current));
    current = {};
    head_lines.clear();
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = chomp(raw);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 8) throw DataError("expected 10 tab-separated columns, got " + std::to_string(cols.size()), line_no);
    // Multiword token ranges ("2-3") and empty nodes ("2.1") carry no tree edge.
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    auto id = to_int(cols[0]);
    if (!id) throw DataError("non-integer ID '" + std::string(cols[0]) + "'", line_no);
    if (*id != static_cast<int>(current.tokens.size()) + 1)
      throw DataError("ID " + std::to_string(*id) + " out of sequence", line_no);
    auto head = to_int(cols[6]);
    if (!head) throw DataError("non-integer HEAD '" + std::string(cols[6]) + "'", line_no);
    if (*head < 0 || *head == *id) throw DataError("invalid HEAD " + std::to_string(*head), line_no);
    if (cols[1].empty()) throw DataError("empty FORM", line_no);
    current.tokens.push_back({*id, std::string(cols[1])});
    current.edges.push_back({*head, *id, std::string(cols[7])});
    head_lines.push_back(line_no);
  }
  flush();
  return out;
}

std::vector<ParsedSentence> load_conllu(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_conllu(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what(), e.line());
  }
}

SentenceGraph align(const AnnotatedSentence& sentence, const ParsedSentence& parse, const RelationMap& relations,
                    const AlignOptions& options) {
  const std::size_t n = sentence.tokens.size(), m = parse.tokens.size();
  for (std::size_t i = 0; i < std::max(n, m); ++i) {
    const bool same = i < n && i < m &&
                      (options.case_insensitive
                           ? ascii_lower(sentence.tokens[i].surface) == ascii_lower(parse.tokens[i].surface)
                           : sentence.tokens[i].surface == parse.tokens[i].surface);
    if (!same) {
      auto show = [](const std::vector<Token>& ts, std::size_t k) {
        return k < ts.size() ? "'" + ts[k].surface + "'" : std::string("<missing>");
      };
      throw DataError("alignment mismatch in " + (sentence.id.empty() ? std::string("sentence") : sentence.id) +
                      " at position " + std::to_string(i + 1) + ": sentence " + show(sentence.tokens, i) +
                      " vs parse " + show(parse.tokens, i) + " (" + std::to_string(n) + " vs " + std::to_string(m) +
                      " tokens)");
    }
  }
  AnnotatedSentence copy = sentence;
  copy.edges = parse.edges;
  return SentenceGraph(std::move(copy), relations);
}

std::vector<SentenceGraph> align_corpus(const std::vector<AnnotatedSentence>& sentences,
                                        const std::vector<ParsedSentence>& parses, const RelationMap& relations,
                                        const AlignOptions& options) {
  if (sentences.size() != parses.size())
    throw DataError("corpus has " + std::to_string(sentences.size()) + " sentences but parse file has " +
                    std::to_string(parses.size()));
  std::vector<SentenceGraph> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) out.push_back(align(sentences[i], parses[i], relations, options));
  return out;
}

std::vector<SentenceGraph> unparsed_corpus(const std::vector<AnnotatedSentence>& sentences) {
  std::vector<SentenceGraph> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.emplace_back(s);
  return out;
}

CorpusStats corpus_stats(const std::vector<AnnotatedSentence>& corpus) {
  CorpusStats st;
  st.sentence_count = corpus.size();
  for (const auto& s : corpus) {
    for (const auto& q : s.quads) {
      ++st.quad_count;
      if (!q.aspect) ++st.implicit_aspect_count;
      if (!q.opinion) ++st.implicit_opinion_count;
      ++st.category_histogram[q.category];
      ++st.sentiment_histogram[std::string(to_string(q.sentiment))];
    }
  }
  return st;
}

CorpusStats corpus_stats(const std::vector<SentenceGraph>& corpus) {
  std::vector<AnnotatedSentence> sentences;
  sentences.reserve(corpus.size());
  for (const auto& g : corpus) sentences.push_back(g.sentence());
  return corpus_stats(sentences);
}

std::string to_canonical_json(const AnnotatedSentence& sentence) {
  nlohmann::ordered_json j;
  j["id"] = sentence.id;
  auto& tokens = j["tokens"] = nlohmann::ordered_json::array();
  for (const auto& t : sentence.tokens) tokens.push_back(t.surface);
  auto& quads = j["quads"] = nlohmann::ordered_json::array();
  for (const auto& q : sentence.quads) {
    nlohmann::ordered_json jq;
    jq["aspect"] = span_json(q.aspect);
    jq["opinion"] = span_json(q.opinion);
    jq["category"] = q.raw_category;
    jq["sentiment"] = to_string(q.sentiment);
    quads.push_back(std::move(jq));
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : sentence.edges) edges.push_back({e.head, e.dependent, e.label});
  try {
    return j.dump();
  } catch (const nlohmann::json::type_error& e) {
    throw DataError("sentence " + sentence.id + " is not valid UTF-8");
  }
}

AnnotatedSentence from_canonical_json(std::string_view line, std::size_t line_no) {
  try {
    auto j = nlohmann::json::parse(line);
    AnnotatedSentence s;
    s.id = j.at("id").get<std::string>();
    int index = 0;
    for (const auto& t : j.at("tokens")) s.tokens.push_back({++index, t.get<std::string>()});
    for (const auto& jq : j.at("quads")) {
      SentimentQuad q;
      q.aspect = span_from_json(jq.at("aspect"));
      q.opinion = span_from_json(jq.at("opinion"));
      q.raw_category = jq.at("category").get<std::string>();
      q.category = normalize_category(q.raw_category);
      auto sent = parse_sentiment(jq.at("sentiment").get<std::string>());
      if (!sent) throw DataError("unknown sentiment in canonical record", line_no);
      q.sentiment = *sent;
      for (const auto& span : {q.aspect, q.opinion})
        if (span && (span->begin < 1 || span->end < span->begin || span->end > index))
          throw DataError("span out of range in canonical record", line_no);
      s.quads.push_back(std::move(q));
    }
    for (const auto& e : j.at("edges"))
      s.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<std::string>()});
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad canonical record: ") + e.what(), line_no);
  }
}

void write_canonical(const std::vector<SentenceGraph>& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& g : corpus) out << to_canonical_json(g.sentence()) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<SentenceGraph> load_canonical(const std::filesystem::path& path, const RelationMap& relations) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<SentenceGraph> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (chomp(line).empty()) continue;
    try {
      out.emplace_back(from_canonical_json(line, line_no), relations);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace s2it
