#include "s2it/types.hpp"

namespace s2it {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::negative: return "negative";
    case Sentiment::neutral: return "neutral";
    case Sentiment::positive: return "positive";
  }
  return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view text) {
  if (text == "negative") return Sentiment::negative;
  if (text == "neutral") return Sentiment::neutral;
  if (text == "positive") return Sentiment::positive;
  return std::nullopt;
}

std::string_view to_string(Role r) { return r == Role::aspect ? "aspect" : "opinion"; }

std::string_view to_string(Target t) { return t == Target::category ? "category" : "sentiment"; }

std::string AnnotatedSentence::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

std::string AnnotatedSentence::span_text(const ElementSpan& span) const {
  if (!span) return std::string(kNullTerm);
  std::string out;
  for (int i = span->begin; i <= span->end; ++i) {
    if (i > span->begin) out += ' ';
    out += tokens.at(i - 1).surface;
  }
  return out;
}

}  // namespace s2it
