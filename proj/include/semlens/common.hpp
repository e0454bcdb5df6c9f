// Shared base types used across the toolkit.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace semlens {

enum class Language { Java, Python };

inline const char* to_string(Language l) {
  return l == Language::Java ? "java" : "python";
}

std::optional<Language> language_from_string(const std::string& s);

// Half-open byte range into a source buffer.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(const Span& other) const {
    return begin <= other.begin && other.end <= end;
  }
  bool overlaps(const Span& other) const {
    return begin < other.end && other.begin < end;
  }
  bool operator==(const Span&) const = default;
};

enum class ParseErrorKind {
  SyntaxError,
  MissingEntryPoint,
  UnsupportedConstruct,
  SerializationError,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semlens
