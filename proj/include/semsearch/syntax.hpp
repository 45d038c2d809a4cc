// Lexical building blocks shared by the Turtle and SPARQL parsers.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace semsearch {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(std::move(message)) {}

  // 1-based.
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

namespace syntax {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xc0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xe0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  } else {
    out += static_cast<char>(0xf0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
    out += static_cast<char>(0x80 | (cp & 0x3f));
  }
}

inline bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_hex(char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }
inline bool is_high(char c) { return static_cast<unsigned char>(c) >= 0x80; }

// Characters allowed inside prefix labels and local names (besides '.', ':' and '%').
inline bool is_name_char(char c) { return is_alpha(c) || is_digit(c) || c == '_' || c == '-' || is_high(c); }

inline char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

// Turtle-style string escaping for the serializer.
inline std::string escape_string(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out += kHex[(c >> 4) & 0xf];
          out += kHex[c & 0xf];
        } else {
          out += c;
        }
    }
  }
  return out;
}

// Character cursor with the token readers common to both grammars.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() { return text_[pos_++]; }
  std::size_t pos() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).substr(0, s.size()) == s; }

  bool consume(char c) {
    if (peek() != c || at_end()) return false;
    ++pos_;
    return true;
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail_at(std::size_t pos, const std::string& message) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(line, col, message);
  }
  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'" + found());
  }

  std::string found() const {
    if (at_end()) return ", found end of input";
    return std::string(", found '") + peek() + "'";
  }

  // '<' ... '>' without resolving; the caller handles base resolution.
  std::string read_iriref() {
    std::size_t start = pos_;
    expect('<');
    std::string out;
    while (true) {
      if (at_end()) fail_at(start, "unterminated IRI");
      char c = get();
      if (c == '>') break;
      if (static_cast<unsigned char>(c) <= 0x20 || std::string_view("<\"{}|^`\\").find(c) != std::string_view::npos) {
        fail_at(pos_ - 1, std::string("bad IRI: illegal character '") + (c == '\n' ? std::string("\\n") : std::string(1, c)) + "'");
      }
      out += c;
    }
    return out;
  }

  // Reads a prefix label up to (not including) ':'. May be empty.
  std::string read_prefix_label() {
    std::string out;
    if (!is_alpha(peek()) && !is_high(peek())) return out;
    while (is_name_char(peek()) || peek() == '.') out += get();
    return drop_trailing_dots(std::move(out));
  }

  // Local part of a prefixed name; never ends with '.'.
  std::string read_local_name() {
    std::string out;
    while (!at_end()) {
      char c = peek();
      if (out.empty() && (c == '-' || c == '.')) break;
      if (is_name_char(c) || c == ':' || c == '.') {
        out += get();
      } else if (c == '%' && is_hex(peek(1)) && is_hex(peek(2))) {
        out += get();
        out += get();
        out += get();
      } else {
        break;
      }
    }
    return drop_trailing_dots(std::move(out));
  }

  // Quoted string with escapes; supports '...', "...", and the long forms.
  std::string read_string() {
    std::size_t start = pos_;
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected string literal" + found());
    bool long_form = peek(1) == quote && peek(2) == quote;
    pos_ += long_form ? 3 : 1;
    std::string out;
    while (true) {
      if (at_end()) fail_at(start, "unterminated literal");
      char c = peek();
      if (long_form) {
        if (c == quote && peek(1) == quote && peek(2) == quote && peek(3) != quote) {
          pos_ += 3;
          break;
        }
      } else if (c == quote) {
        ++pos_;
        break;
      } else if (c == '\n' || c == '\r') {
        fail_at(start, "unterminated literal");
      }
      if (c == '\\') {
        read_escape(out);
      } else {
        out += get();
      }
    }
    return out;
  }

  // After '@': letters, then '-' groups of letters/digits. Lowercased.
  std::string read_lang_tag() {
    std::string out;
    while (is_alpha(peek())) out += to_lower(get());
    if (out.empty()) fail("bad language tag");
    while (peek() == '-' && (is_alpha(peek(1)) || is_digit(peek(1)))) {
      out += get();
      while (is_alpha(peek()) || is_digit(peek())) out += to_lower(get());
    }
    return out;
  }

  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string drop_trailing_dots(std::string s) {
    while (!s.empty() && s.back() == '.') {
      s.pop_back();
      --pos_;
    }
    return s;
  }

  void read_escape(std::string& out) {
    std::size_t start = pos_;
    ++pos_;  // backslash
    if (at_end()) fail_at(start, "unterminated literal");
    char e = get();
    switch (e) {
      case 't': out += '\t'; return;
      case 'b': out += '\b'; return;
      case 'n': out += '\n'; return;
      case 'r': out += '\r'; return;
      case 'f': out += '\f'; return;
      case '"': out += '"'; return;
      case '\'': out += '\''; return;
      case '\\': out += '\\'; return;
      case 'u':
      case 'U': {
        int digits = e == 'u' ? 4 : 8;
        std::uint32_t cp = 0;
        for (int i = 0; i < digits; ++i) {
          char h = peek();
          if (!is_hex(h)) fail_at(start, "bad unicode escape");
          ++pos_;
          cp = cp * 16 + static_cast<std::uint32_t>(is_digit(h) ? h - '0' : to_lower(h) - 'a' + 10);
        }
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) fail_at(start, "bad unicode escape");
        append_utf8(out, cp);
        return;
      }
      default:
        fail_at(start, std::string("bad escape '\\") + e + "'");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace syntax
}  // namespace semsearch
