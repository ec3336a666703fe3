#include "thodge/scalar.hpp"

#include <cctype>
#include <cstdlib>

namespace thodge {

namespace {

// Rational literal: [sign] digits [ '/' digits ], denominator > 0.
std::optional<Rational> parse_rational_part(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = s[pos] == '-';
    ++pos;
  }
  std::size_t num_begin = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == num_begin) return std::nullopt;
  boost::multiprecision::cpp_int num(s.substr(num_begin, pos - num_begin));
  boost::multiprecision::cpp_int den(1);
  if (pos < s.size()) {
    if (s[pos] != '/') return std::nullopt;
    ++pos;
    std::size_t den_begin = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == den_begin || pos != s.size()) return std::nullopt;
    den = boost::multiprecision::cpp_int(s.substr(den_begin));
    if (den == 0) return std::nullopt;
  }
  Rational r(num, den);
  if (neg) r = -r;
  return r;
}

// Splits "x+yi" / "x-yi" at the joining sign. Position 0 is a leading sign,
// not a join; for decimal literals a sign right after e/E is an exponent.
std::size_t find_join(const std::string& s, bool decimal) {
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k] != '+' && s[k] != '-') continue;
    if (decimal && (s[k - 1] == 'e' || s[k - 1] == 'E')) continue;
    return k;
  }
  return std::string::npos;
}

// Imaginary coefficient: rational text with the trailing 'i' stripped;
// bare "i", "+i", "-i" mean units.
std::optional<Rational> parse_imag_part(std::string s) {
  if (s.empty() || s.back() != 'i') return std::nullopt;
  s.pop_back();
  if (s.empty() || s == "+") return Rational(1);
  if (s == "-") return Rational(-1);
  return parse_rational_part(s);
}

// Finite decimal literal to an exact rational: "1.25" -> 5/4.
std::optional<Rational> parse_decimal_part(const std::string& s) {
  std::size_t pos = 0;
  bool neg = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    neg = s[pos] == '-';
    ++pos;
  }
  std::size_t int_begin = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == int_begin) return std::nullopt;
  boost::multiprecision::cpp_int num(s.substr(int_begin, pos - int_begin));
  boost::multiprecision::cpp_int den(1);
  if (pos < s.size()) {
    if (s[pos] != '.') return std::nullopt;
    ++pos;
    std::size_t frac_begin = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == frac_begin || pos != s.size()) return std::nullopt;
    for (std::size_t k = frac_begin; k < pos; ++k) {
      num = num * 10 + (s[k] - '0');
      den *= 10;
    }
  }
  Rational r(num, den);
  if (neg) r = -r;
  return r;
}

std::optional<Rational> parse_part_lenient(const std::string& s) {
  if (auto r = parse_rational_part(s)) return r;
  return parse_decimal_part(s);
}

std::optional<Rational> parse_imag_part_lenient(std::string s) {
  if (s.empty() || s.back() != 'i') return std::nullopt;
  s.pop_back();
  if (s.empty() || s == "+") return Rational(1);
  if (s == "-") return Rational(-1);
  return parse_part_lenient(s);
}

std::optional<double> parse_double_part(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double_imag(std::string s) {
  if (s.empty() || s.back() != 'i') return std::nullopt;
  s.pop_back();
  if (s.empty() || s == "+") return 1.0;
  if (s == "-") return -1.0;
  return parse_double_part(s);
}

std::string strip_spaces(const std::string& text) {
  std::string s;
  s.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  return s;
}

}  // namespace

std::optional<GaussianRational> parse_gaussian_rational(const std::string& text) {
  std::string s = strip_spaces(text);
  if (s.empty()) return std::nullopt;
  std::size_t join = find_join(s, /*decimal=*/false);
  if (join == std::string::npos) {
    if (s.back() == 'i') {
      auto im = parse_imag_part(s);
      if (!im) return std::nullopt;
      return GaussianRational{Rational(0), *im};
    }
    auto re = parse_rational_part(s);
    if (!re) return std::nullopt;
    return GaussianRational{*re};
  }
  auto re = parse_rational_part(s.substr(0, join));
  auto im = parse_imag_part(s.substr(join));  // keeps the joining sign
  if (!re || !im) return std::nullopt;
  return GaussianRational{*re, *im};
}

std::optional<GaussianRational> parse_gaussian_rational_lenient(const std::string& text) {
  if (auto strict = parse_gaussian_rational(text)) return strict;
  std::string s = strip_spaces(text);
  if (s.empty()) return std::nullopt;
  std::size_t join = find_join(s, /*decimal=*/false);
  if (join == std::string::npos) {
    if (s.back() == 'i') {
      auto im = parse_imag_part_lenient(s);
      if (!im) return std::nullopt;
      return GaussianRational{Rational(0), *im};
    }
    auto re = parse_part_lenient(s);
    if (!re) return std::nullopt;
    return GaussianRational{*re};
  }
  auto re = parse_part_lenient(s.substr(0, join));
  auto im = parse_imag_part_lenient(s.substr(join));
  if (!re || !im) return std::nullopt;
  return GaussianRational{*re, *im};
}

std::optional<Complex> parse_complex(const std::string& text) {
  if (auto exact = parse_gaussian_rational(text)) return exact->to_complex();
  std::string s = strip_spaces(text);
  if (s.empty()) return std::nullopt;
  std::size_t join = find_join(s, /*decimal=*/true);
  if (join == std::string::npos) {
    if (s.back() == 'i') {
      auto im = parse_double_imag(s);
      if (!im) return std::nullopt;
      return Complex{0.0, *im};
    }
    auto re = parse_double_part(s);
    if (!re) return std::nullopt;
    return Complex{*re, 0.0};
  }
  auto re = parse_double_part(s.substr(0, join));
  auto im = parse_double_imag(s.substr(join));
  if (!re || !im) return std::nullopt;
  return Complex{*re, *im};
}

std::string to_string(const GaussianRational& z) {
  if (z.im == 0) return z.re.str();
  std::string s;
  if (z.re != 0) {
    s = z.re.str();
    if (z.im > 0) s += '+';
  }
  if (z.im == 1) {
    s += "i";
  } else if (z.im == -1) {
    s += "-i";
  } else {
    s += z.im.str();
    s += 'i';
  }
  return s;
}

}  // namespace thodge
