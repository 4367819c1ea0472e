#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace s2it {

// Raised for malformed or inconsistent input data. Carries the 1-based source
// line when one is known (0 otherwise).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when a caller breaks an API precondition (bad hop count, bad field spec).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::string_view kNullTerm = "NULL";

enum class Sentiment { negative, neutral, positive };

std::string_view to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view text);

struct Token {
  int index = 0;  // 1-based
  std::string surface;
};

// head == 0 is the virtual root.
struct DependencyEdge {
  int head = 0;
  int dependent = 0;
  std::string label;

  bool operator==(const DependencyEdge&) const = default;
};

// 1-based inclusive token range.
struct Span {
  int begin = 0;
  int end = 0;

  bool operator==(const Span&) const = default;
  int length() const { return end - begin + 1; }
};

// std::nullopt marks an implicit element.
using ElementSpan = std::optional<Span>;

struct SentimentQuad {
  ElementSpan aspect;
  ElementSpan opinion;
  std::string category;      // normalized, e.g. "service general"
  std::string raw_category;  // as in the source file, e.g. "SERVICE#GENERAL"
  Sentiment sentiment = Sentiment::neutral;
};

struct AnnotatedSentence {
  std::string id;
  std::vector<Token> tokens;
  std::vector<SentimentQuad> quads;
  std::vector<DependencyEdge> edges;  // empty until aligned

  std::size_t size() const { return tokens.size(); }
  std::string text() const;
  // Space-joined surface of the span, or "NULL" when implicit.
  std::string span_text(const ElementSpan& span) const;
};

// A sentence as read from a dependency parse file.
struct ParsedSentence {
  std::vector<Token> tokens;
  std::vector<DependencyEdge> edges;
};

enum class Role { aspect, opinion };
std::string_view to_string(Role r);

enum class Target { category, sentiment };
std::string_view to_string(Target t);

}  // namespace s2it
