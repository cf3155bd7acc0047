#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcl {

/// Raised for malformed term or template text. `position()` is a 0-based
/// byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

// Recursive-descent parser for left-associative juxtaposition:
//   term := atom { atom }      atom := WORD | '(' term ')'
// WORD is a maximal run of [A-Za-z0-9]; the builder validates it.
// Builder must provide:
//   value_type atom(std::string_view word, std::size_t pos);
//   value_type apply(value_type fn, value_type arg);
template <class Builder>
class ApplicativeParser {
 public:
  using value_type = typename Builder::value_type;

  ApplicativeParser(std::string_view text, Builder& builder) : text_(text), builder_(builder) {}

  value_type parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty input", pos_);
    value_type result = parse_term();
    skip_space();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return result;
  }

 private:
  static bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_atom_start() {
    skip_space();
    return pos_ < text_.size() && (text_[pos_] == '(' || is_word_char(text_[pos_]));
  }

  value_type parse_term() {
    if (!at_atom_start()) {
      if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    value_type acc = parse_atom();
    while (at_atom_start()) acc = builder_.apply(std::move(acc), parse_atom());
    return acc;
  }

  value_type parse_atom() {
    if (text_[pos_] == '(') {
      const std::size_t open = pos_++;
      skip_space();
      if (pos_ < text_.size() && text_[pos_] == ')') throw ParseError("empty parentheses", open);
      value_type inner = parse_term();
      skip_space();
      if (pos_ == text_.size() || text_[pos_] != ')') throw ParseError("missing ')'", pos_);
      ++pos_;
      return inner;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_word_char(text_[pos_])) ++pos_;
    return builder_.atom(text_.substr(start, pos_ - start), start);
  }

  std::string_view text_;
  Builder& builder_;
  std::size_t pos_ = 0;
};

inline bool is_identifier(std::string_view word) {
  if (word.empty() || !std::isalpha(static_cast<unsigned char>(word.front()))) return false;
  for (char c : word)
    if (!std::isalnum(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail
}  // namespace qcl
