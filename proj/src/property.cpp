#include "svbench/property.hpp"

#include <cctype>
#include <vector>

namespace svbench::task {
namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool is_ident_char(char c) { return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  PropertySpec parse() {
    PropertySpec spec;
    keyword("CHECK");
    punct('(');
    keyword("init");
    punct('(');

    std::vector<std::string> parts{identifier("entry-point name")};
    while (peek() == '.') {
      ++pos_;
      parts.push_back(identifier("entry-point name"));
    }
    if (parts.size() < 2) fail("expected '<type>.<method>' entry point");
    spec.entry_method = parts.back();
    parts.pop_back();
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i) spec.entry_type += '.';
      spec.entry_type += parts[i];
    }

    punct('(');
    punct(')');
    punct(')');
    punct(',');
    keyword("LTL");
    punct('(');
    formula();
    punct(')');
    punct(')');
    skip_space();
    if (pos_ != text_.size()) fail("trailing input after property clause");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw PropertyError(PropertyErrc::MalformedProperty, pos_, msg); }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void punct(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier(const char* what) {
    skip_space();
    if (pos_ >= text_.size() || !is_ident_start(text_[pos_])) fail(std::string("expected ") + what);
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void keyword(std::string_view kw) {
    std::size_t at = (skip_space(), pos_);
    if (identifier("keyword") != kw) {
      pos_ = at;
      fail("expected '" + std::string(kw) + "'");
    }
  }

  // Any balanced token sequence is well-formed; only `G assert` is supported.
  void formula() {
    std::size_t start = (skip_space(), pos_);
    std::vector<std::string> tokens;
    int depth = 0;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated LTL formula");
      char c = text_[pos_];
      if (c == ')') {
        if (depth == 0) break;
        --depth;
        tokens.emplace_back(1, c);
        ++pos_;
      } else if (c == '(') {
        ++depth;
        tokens.emplace_back(1, c);
        ++pos_;
      } else if (c == ',') {
        fail("unexpected ',' in LTL formula");
      } else if (is_ident_char(c)) {
        std::size_t s = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        tokens.emplace_back(text_.substr(s, pos_ - s));
      } else {
        tokens.emplace_back(1, c);
        ++pos_;
      }
    }
    if (tokens.empty()) fail("empty LTL formula");
    if (tokens.size() != 2 || tokens[0] != "G" || tokens[1] != "assert") {
      throw PropertyError(PropertyErrc::UnsupportedFormula, start,
                          "unsupported LTL formula; only 'G assert' is recognized");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

PropertySpec parse_property(std::string_view text) { return Parser(text).parse(); }

std::string render(const PropertySpec& spec) {
  return "CHECK( init(" + spec.entry_type + "." + spec.entry_method + "()), LTL(G assert) )";
}

}  // namespace svbench::task
