// Text form of polynomials: `coeff * t^a x1^b u1^c` terms joined by `+`.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "momentfp/polycore.hpp"

namespace mfp {

namespace {

std::string format_coeff(double c, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, c);
  return buf;
}

class TextParser {
 public:
  TextParser(std::string_view text, const VariableSpace& space) : s_(text), space_(space) {}

  Polynomial run() {
    Polynomial p(space_);
    skip_ws();
    if (at_end()) fail("empty polynomial");
    for (;;) {
      parse_term(p);
      skip_ws();
      if (at_end()) break;
      if (s_[pos_] != '+') fail("expected '+' between terms");
      ++pos_;
      skip_ws();
    }
    return p;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("polynomial parse error at column " + std::to_string(pos_ + 1) + ": " + msg + " in '" +
                     std::string(s_) + "'");
  }

  bool starts_number() const {
    if (at_end()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
  }

  double parse_number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("expected a coefficient");
    // strtod accepts inf/nan spellings; reject them.
    if (!std::isfinite(v)) fail("non-finite coefficient");
    pos_ += static_cast<size_t>(end - rest.c_str());
    return v;
  }

  bool starts_factor() const { return !at_end() && std::isalpha(static_cast<unsigned char>(s_[pos_])); }

  void parse_factor(ExponentVector& e) {
    const size_t start = pos_;
    while (!at_end() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    const auto idx = space_.index_of(name);
    if (!idx) {
      pos_ = start;
      fail("unknown variable '" + std::string(name) + "'");
    }
    int power = 1;
    skip_ws();
    if (!at_end() && s_[pos_] == '^') {
      ++pos_;
      skip_ws();
      if (at_end() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected exponent after '^'");
      power = 0;
      while (!at_end() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        power = power * 10 + (s_[pos_] - '0');
        if (power > 1000) fail("exponent too large");
        ++pos_;
      }
    }
    e.set(*idx, e[*idx] + power);
  }

  void parse_term(Polynomial& p) {
    double coeff = 1.0;
    ExponentVector e(space_.size());
    if (starts_number()) {
      coeff = parse_number();
      skip_ws();
      if (!at_end() && s_[pos_] == '*') {
        ++pos_;
        skip_ws();
        if (!starts_factor()) fail("expected a variable after '*'");
      } else {
        p.add_term(e, coeff);
        return;
      }
    } else if (!starts_factor()) {
      fail("expected a term");
    }
    while (starts_factor()) {
      parse_factor(e);
      skip_ws();
    }
    p.add_term(e, coeff);
  }

  std::string_view s_;
  const VariableSpace& space_;
  size_t pos_ = 0;
};

}  // namespace

std::string Polynomial::to_string(int precision) const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) out += " + ";
    first = false;
    out += format_coeff(c, precision);
    if (e.degree() == 0) continue;
    out += " *";
    for (int i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      out += ' ';
      out += space_.name(i);
      if (e[i] > 1) out += "^" + std::to_string(e[i]);
    }
  }
  return out;
}

Polynomial Polynomial::parse(std::string_view text, const VariableSpace& space) {
  return TextParser(text, space).run();
}

}  // namespace mfp
