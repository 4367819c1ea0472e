#include "s2it/decode.hpp"

#include <array>

namespace s2it {
namespace {

constexpr std::array<std::string_view, 4> kKnownKeys{"aspect", "opinion", "category", "sentiment"};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_punct(char c) { return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') || (c >= '{' && c <= '~'); }
char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string lowered(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = lower(c);
  return out;
}

// If `lc` has "<key>\s*:" at `pos`, returns the index just past the colon.
std::size_t key_at(std::string_view lc, std::size_t pos, std::string_view key) {
  if (lc.compare(pos, key.size(), key) != 0) return std::string_view::npos;
  // Reject a longer word that merely starts with the key.
  std::size_t p = pos + key.size();
  while (p < lc.size() && (lc[p] == ' ' || lc[p] == '\t')) ++p;
  if (p < lc.size() && lc[p] == ':') return p + 1;
  return std::string_view::npos;
}

std::size_t any_key_at(std::string_view lc, std::size_t pos) {
  for (auto k : kKnownKeys)
    if (auto end = key_at(lc, pos, k); end != std::string_view::npos) return end;
  return std::string_view::npos;
}

// Finds ",\s*<key>\s*:" at or after `from`. Returns {comma position, end of colon}.
std::pair<std::size_t, std::size_t> find_separator(std::string_view lc, std::size_t from, std::string_view key) {
  for (std::size_t c = lc.find(',', from); c != std::string_view::npos; c = lc.find(',', c + 1)) {
    std::size_t p = c + 1;
    while (p < lc.size() && is_space(lc[p])) ++p;
    if (auto end = key_at(lc, p, key); end != std::string_view::npos) return {c, end};
  }
  return {std::string_view::npos, std::string_view::npos};
}

bool has_trailing_key(std::string_view lc_value) {
  for (auto k : kKnownKeys)
    if (find_separator(lc_value, 0, k).first != std::string_view::npos) return true;
  return false;
}

// Record boundaries: a '|' followed (after blanks) by a known "key:".
std::vector<std::string_view> split_records(std::string_view text) {
  const std::string lc = lowered(text);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t bar = lc.find('|'); bar != std::string::npos; bar = lc.find('|', bar + 1)) {
    std::size_t p = bar + 1;
    while (p < lc.size() && is_space(lc[p])) ++p;
    if (any_key_at(lc, p) == std::string_view::npos) continue;
    out.push_back(text.substr(start, bar - start));
    start = bar + 1;
  }
  out.push_back(text.substr(start));
  return out;
}

}  // namespace

Term normalize(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  bool pending_space = false;
  for (char c : value) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += lower(c);
  }
  std::size_t b = 0, e = out.size();
  while (b < e && (is_punct(out[b]) || out[b] == ' ')) ++b;
  while (e > b && (is_punct(out[e - 1]) || out[e - 1] == ' ')) --e;
  out = out.substr(b, e - b);
  if (out == "null") return std::nullopt;
  return out;
}

std::string term_text(const Term& term) { return term ? *term : std::string(kNullTerm); }

std::vector<std::string> parse_field_spec(std::string_view spec) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = spec.find(',', start);
    auto key = lowered(trim(spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start)));
    if (key.empty()) throw ContractError("field spec '" + std::string(spec) + "' has an empty key");
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw ContractError("field spec key '" + key + "' is not one of aspect, opinion, category, sentiment");
    if (std::find(out.begin(), out.end(), key) != out.end())
      throw ContractError("field spec repeats key '" + key + "'");
    out.push_back(key);
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

ParsedRecords parse_records(std::string_view text, const std::vector<std::string>& fields,
                            const DecodeOptions& options) {
  if (fields.empty()) throw ContractError("parse_records needs at least one field");
  for (const auto& f : fields)
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), f) == kKnownKeys.end())
      throw ContractError("unknown field '" + f + "'");

  ParsedRecords out;
  if (!options.end_marker.empty()) {
    if (auto m = text.find(options.end_marker); m != std::string_view::npos) text = text.substr(0, m);
  }
  text = trim(text);
  if (text.empty()) return out;
  if (auto t = normalize(text); t && *t == lowered(options.empty_literal)) return out;

  for (auto segment : split_records(text)) {
    segment = trim(segment);
    if (segment.empty()) {
      ++out.malformed;
      continue;
    }
    const std::string lc = lowered(segment);
    std::size_t pos = key_at(lc, 0, fields[0]);
    if (pos == std::string_view::npos) {
      ++out.malformed;
      continue;
    }
    std::vector<std::string> values;
    bool ok = true;
    for (std::size_t k = 1; k < fields.size() && ok; ++k) {
      auto [comma, next] = find_separator(lc, pos, fields[k]);
      if (comma == std::string_view::npos) {
        ok = false;
        break;
      }
      values.emplace_back(trim(segment.substr(pos, comma - pos)));
      pos = next;
    }
    if (!ok) {
      ++out.malformed;
      continue;
    }
    values.emplace_back(trim(segment.substr(pos)));
    if (has_trailing_key(lowered(values.back()))) {
      ++out.malformed;
      continue;
    }
    bool all_empty = true;
    for (const auto& v : values) all_empty = all_empty && v.empty();
    if (all_empty) {
      ++out.malformed;
      continue;
    }
    out.records.push_back(std::move(values));
  }
  return out;
}

DecodedPairs decode_pairs(std::string_view text, bool opinion_first, const DecodeOptions& options) {
  static const std::vector<std::string> ao{"aspect", "opinion"}, oa{"opinion", "aspect"};
  auto parsed = parse_records(text, opinion_first ? oa : ao, options);
  DecodedPairs out{{}, parsed.malformed};
  for (const auto& r : parsed.records) {
    PairPrediction p = opinion_first ? PairPrediction{normalize(r[1]), normalize(r[0])}
                                     : PairPrediction{normalize(r[0]), normalize(r[1])};
    if ((p.aspect && p.aspect->empty()) && (p.opinion && p.opinion->empty())) {
      ++out.malformed;
      continue;
    }
    out.pairs.push_back(std::move(p));
  }
  return out;
}

DecodedQuads decode_quads(std::string_view text, const DecodeOptions& options) {
  static const std::vector<std::string> fields{"aspect", "opinion", "category", "sentiment"};
  auto parsed = parse_records(text, fields, options);
  DecodedQuads out{{}, parsed.malformed};
  for (const auto& r : parsed.records) {
    QuadPrediction q;
    q.aspect = normalize(r[0]);
    q.opinion = normalize(r[1]);
    q.category = lowered(term_text(normalize(r[2])));
    const Term s = normalize(r[3]);
    q.sentiment = s ? parse_sentiment(*s) : std::nullopt;
    out.quads.push_back(std::move(q));
  }
  return out;
}

DecodedLabels decode_labels(std::string_view text, Role element, Target target, const DecodeOptions& options) {
  const std::vector<std::string> fields{std::string(to_string(element)), std::string(to_string(target))};
  auto parsed = parse_records(text, fields, options);
  DecodedLabels out{{}, parsed.malformed};
  for (const auto& r : parsed.records) out.labels.push_back({normalize(r[0]), lowered(term_text(normalize(r[1])))});
  return out;
}

MergeStrategy parse_merge_strategy(std::string_view text) {
  if (text == "union") return MergeStrategy::union_;
  if (text == "intersection") return MergeStrategy::intersection;
  throw ContractError("unknown merge strategy '" + std::string(text) + "' (expected union|intersection)");
}

std::string_view to_string(MergeStrategy m) { return m == MergeStrategy::union_ ? "union" : "intersection"; }

std::vector<PairPrediction> merge_bidirectional(const std::vector<PairPrediction>& ao,
                                                const std::vector<PairPrediction>& oa, MergeStrategy strategy) {
  std::vector<PairPrediction> out;
  auto add = [&](const PairPrediction& p) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  };
  if (strategy == MergeStrategy::union_) {
    for (const auto& p : ao) add(p);
    for (const auto& p : oa) add(p);
  } else {
    for (const auto& p : ao)
      if (std::find(oa.begin(), oa.end(), p) != oa.end()) add(p);
  }
  return out;
}

std::vector<PairPrediction> filter_to_sentence(const std::vector<PairPrediction>& pairs, std::string_view sentence) {
  const std::string haystack = term_text(normalize(sentence));
  std::vector<PairPrediction> out;
  auto present = [&](const Term& t) { return !t || haystack.find(*t) != std::string::npos; };
  for (const auto& p : pairs)
    if (present(p.aspect) && present(p.opinion)) out.push_back(p);
  return out;
}

}  // namespace s2it
