#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "xxz/local_operator.hpp"

namespace xxz {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(Complex c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "i";
  std::string im = format_double(c.imag());
  if (im.front() != '-') im.insert(im.begin(), '+');
  return format_double(c.real()) + im + "i";
}

class OperatorParser {
 public:
  explicit OperatorParser(std::string_view text) : text_(text) {}

  LocalOperator parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty operator text", pos_);
    if (text_.substr(pos_) == "0") return {};
    LocalOperator op;
    while (true) {
      parse_term(op);
      skip_ws();
      if (at_end()) break;
      expect('+');
    }
    op.prune();
    return op;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  // Unsigned decimal literal; the caller consumes any sign.
  double parse_unsigned_real() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    if (begin == end || !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.')) {
      throw ParseError("expected number", pos_);
    }
    double v = 0.0;
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc()) throw ParseError("malformed number", pos_);
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    return v;
  }

  // [sign] (number | number 'i' | 'i')
  std::pair<double, bool> parse_signed_part() {
    skip_ws();
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
      skip_ws();
    }
    if (peek() == 'i') {
      ++pos_;
      return {sign, true};
    }
    double v = sign * parse_unsigned_real();
    if (peek() == 'i') {
      ++pos_;
      return {v, true};
    }
    return {v, false};
  }

  Complex parse_complex() {
    auto [first, first_imag] = parse_signed_part();
    if (first_imag) return {0.0, first};
    skip_ws();
    if (peek() == '+' || peek() == '-') {
      std::size_t mark = pos_;
      auto [second, second_imag] = parse_signed_part();
      if (!second_imag) throw ParseError("expected imaginary part", mark);
      return {first, second};
    }
    return {first, 0.0};
  }

  void parse_term(LocalOperator& op) {
    Complex c = parse_complex();
    expect('*');
    skip_ws();
    std::size_t start = pos_;
    while (!at_end() && std::string_view("0xyzXYZI+-").find(peek()) != std::string_view::npos) ++pos_;
    if (pos_ == start) throw ParseError("expected Pauli symbols", pos_);
    std::string_view word = text_.substr(start, pos_ - start);
    expect('@');
    skip_ws();
    int sign = 1;
    if (peek() == '-' || peek() == '+') {
      sign = peek() == '-' ? -1 : 1;
      ++pos_;
    }
    const char* begin = text_.data() + pos_;
    int offset = 0;
    auto res = std::from_chars(begin, text_.data() + text_.size(), offset);
    if (res.ec != std::errc()) throw ParseError("expected integer offset", pos_);
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    try {
      LocalOperator term = LocalOperator::from_symbols(word, sign * offset, c);
      for (const auto& [p, coeff] : term.terms()) op.accumulate(p, coeff);
    } catch (const WindowTooWide& e) {
      throw ParseError(e.what(), start);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Text form: `<complex> * <symbols> @ <offset>` terms joined by ` + `, in
/// canonical term order. The zero operator is written `0`.
inline std::string serialize_operator(const LocalOperator& op) {
  if (op.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [p, c] : op.sorted_terms()) {
    if (!first) out += " + ";
    first = false;
    out += detail::format_complex(c);
    out += " * ";
    out += p.is_identity() ? std::string("0") : p.symbols();
    out += " @ ";
    out += std::to_string(p.offset());
  }
  return out;
}

/// Inverse of `serialize_operator`; also accepts `+`/`-` ladder symbols.
inline LocalOperator parse_operator(std::string_view text) {
  return detail::OperatorParser(text).parse();
}

inline nlohmann::json operator_to_json(const LocalOperator& op) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [p, c] : op.sorted_terms()) {
    terms.push_back({{"re", c.real()},
                     {"im", c.imag()},
                     {"string", p.is_identity() ? std::string("0") : p.symbols()},
                     {"offset", p.offset()}});
  }
  return {{"terms", terms}};
}

inline LocalOperator operator_from_json(const nlohmann::json& j) {
  LocalOperator op;
  try {
    for (const auto& t : j.at("terms")) {
      Complex c(t.at("re").get<double>(), t.at("im").get<double>());
      auto word = t.at("string").get<std::string>();
      LocalOperator term = LocalOperator::from_symbols(word, t.at("offset").get<int>(), c);
      for (const auto& [p, coeff] : term.terms()) op.accumulate(p, coeff);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad operator JSON: ") + e.what(), 0);
  }
  op.prune();
  return op;
}

}  // namespace xxz
