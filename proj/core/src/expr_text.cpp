#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "quadue/error.hpp"
#include "quadue/expr.hpp"

namespace quadue::expr {

std::string format_number(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Parser
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | '+' unary | power
//   power   := primary ('^' unary)?          exponent must fold to a constant
//   primary := number | 'x' digits | ('exp' | 'log') '(' expr ')' | '(' expr ')'

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::ParseError, what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(parse_term());
      else if (accept('-'))
        terms.push_back(-parse_term());
      else
        break;
    }
    return terms.size() == 1 ? terms.front() : Expr::sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_unary();
    for (;;) {
      if (accept('*'))
        acc = acc * parse_unary();
      else if (accept('/'))
        acc = acc / parse_unary();
      else
        break;
    }
    return acc;
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) {
      Expr exponent = parse_unary();
      if (!exponent.is_constant()) fail("exponent must be constant");
      return pow(base, exponent.number());
    }
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "exp" || word == "log") {
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return word == "exp" ? exp(arg) : log(arg);
      }
      if (word.size() > 1 && word[0] == 'x') {
        int index = 0;
        auto res = std::from_chars(word.data() + 1, word.data() + word.size(), index);
        if (res.ec != std::errc() || res.ptr != word.data() + word.size() || index < 1)
          fail("bad variable '" + std::string(word) + "'");
        return Expr::variable(index - 1);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  double parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_) fail("bad number");
    return value;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printer. Precedence levels: 1 sum, 2 product/quotient, 3 unary minus,
// 4 power, 5 atom.

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Sum:
      return 1;
    case Kind::Product:
    case Kind::Quotient:
      return 2;
    case Kind::IntPower:
    case Kind::RealPower:
      return 4;
    case Kind::Constant:
      return e.number() < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, int min_level, std::string& out) {
  if (precedence(e) < min_level) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

// Product without its leading constant factor (which the caller has emitted).
void print_factors(std::span<const Expr> factors, std::string& out) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i > 0) out += '*';
    print_wrapped(factors[i], 3, out);
  }
}

void print_product(const Expr& e, std::string& out, bool negate) {
  auto ch = e.children();
  double coef = 1.0;
  std::span<const Expr> rest = ch;
  if (ch[0].is_constant()) {
    coef = ch[0].number();
    rest = ch.subspan(1);
  }
  if (negate) coef = -coef;
  if (coef == -1.0) {
    out += '-';
  } else if (coef != 1.0) {
    if (coef < 0.0) {
      out += '-';
      out += format_number(-coef);
    } else {
      out += format_number(coef);
    }
    out += '*';
  }
  print_factors(rest, out);
}

bool leading_negative(const Expr& e) {
  if (e.is_constant()) return e.number() < 0.0;
  return e.kind() == Kind::Product && e.children()[0].is_constant() && e.children()[0].number() < 0.0;
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::Constant:
      out += format_number(e.number());
      return;
    case Kind::Variable:
      out += 'x';
      out += std::to_string(e.index() + 1);
      return;
    case Kind::Sum: {
      auto ch = e.children();
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const Expr& t = ch[i];
        if (i == 0) {
          if (t.kind() == Kind::Product)
            print_product(t, out, false);
          else
            print_wrapped(t, 2, out);
          continue;
        }
        if (leading_negative(t)) {
          out += " - ";
          if (t.is_constant()) {
            out += format_number(-t.number());
          } else {
            std::string tmp;
            print_product(t, tmp, true);
            out += tmp;
          }
        } else {
          out += " + ";
          if (t.kind() == Kind::Product)
            print_product(t, out, false);
          else
            print_wrapped(t, 2, out);
        }
      }
      return;
    }
    case Kind::Product:
      print_product(e, out, false);
      return;
    case Kind::Quotient:
      print_wrapped(e.children()[0], 2, out);
      out += '/';
      print_wrapped(e.children()[1], 4, out);
      return;
    case Kind::IntPower:
    case Kind::RealPower:
      print_wrapped(e.children()[0], 5, out);
      out += '^';
      if (e.number() < 0.0) {
        out += '(';
        out += format_number(e.number());
        out += ')';
      } else {
        out += format_number(e.number());
      }
      return;
    case Kind::Exp:
    case Kind::Log:
      out += e.kind() == Kind::Exp ? "exp(" : "log(";
      print(e.children()[0], out);
      out += ')';
      return;
  }
}

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace quadue::expr
