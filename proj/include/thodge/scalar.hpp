#pragma once

// Coefficient fields for the invariant-form algebra.
//
// Exact mode works over Gaussian rationals a + b*i with a, b arbitrary
// precision rationals, so every algebraic identity in the library can be
// asserted with == instead of a tolerance.  Numeric mode uses
// std::complex<double>; zero decisions are then made at the call sites that
// own a tolerance, never inside the arithmetic.

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace thodge {

using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

inline double to_double(const Rational& r) { return static_cast<double>(r); }

// ---- Gaussian rational ----------------------------------------------------

struct GaussianRational {
  Rational re{0};
  Rational im{0};

  GaussianRational() = default;
  GaussianRational(int v) : re(v) {}  // NOLINT: implicit by design, mirrors int -> complex
  GaussianRational(Rational r) : re(std::move(r)) {}
  GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussianRational conj() const { return {re, -im}; }

  // |z|^2, exact.
  Rational norm_sq() const { return re * re + im * im; }

  Complex to_complex() const { return {to_double(re), to_double(im)}; }

  friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
  friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
    Rational n = b.norm_sq();
    if (n == 0) throw std::domain_error("GaussianRational: division by zero");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
  GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
  GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
  GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
};

std::string to_string(const GaussianRational& z);

// Parses "a/b" or "a/b+c/di" (denominators positive, "/1" may be omitted,
// "-" accepted as the joining sign, "i"/"-i" for unit imaginary parts).
// Returns nullopt on malformed input, including zero denominators.
std::optional<GaussianRational> parse_gaussian_rational(const std::string& text);
// Same grammar but additionally accepts finite decimal literals ("0.25"),
// converted exactly; used where inputs declare the numeric coefficient mode.
std::optional<GaussianRational> parse_gaussian_rational_lenient(const std::string& text);

// Same grammar, plus decimal literals ("0.25", "1e-3", "2.5+0.5i"). Used by
// numeric-mode model files.
std::optional<Complex> parse_complex(const std::string& text);

// ---- scalar_field traits ---------------------------------------------------

// The algebra layer is templated on the coefficient field S and only touches
// it through these hooks.
template <class S>
struct scalar_field;

template <>
struct scalar_field<GaussianRational> {
  static constexpr bool exact = true;
  using real_type = Rational;
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return {Rational(1)}; }
  static GaussianRational from_int(long long v) { return {Rational(v)}; }
  static GaussianRational conj(const GaussianRational& z) { return z.conj(); }
  static bool is_zero(const GaussianRational& z) { return z.is_zero(); }
  static real_type norm_sq(const GaussianRational& z) { return z.norm_sq(); }
  static Complex to_complex(const GaussianRational& z) { return z.to_complex(); }
};

template <>
struct scalar_field<Complex> {
  static constexpr bool exact = false;
  using real_type = double;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex from_int(long long v) { return {static_cast<double>(v), 0.0}; }
  static Complex conj(const Complex& z) { return std::conj(z); }
  // Structural zero only; tolerance decisions live with the caller.
  static bool is_zero(const Complex& z) { return z.real() == 0.0 && z.imag() == 0.0; }
  static real_type norm_sq(const Complex& z) { return std::norm(z); }
  static Complex to_complex(const Complex& z) { return z; }
};

// i^k for k mod 4, exact. Used by the Hodge star volume normalization.
template <class S>
S unit_imaginary_power(int k) {
  int m = ((k % 4) + 4) % 4;
  S i2 = scalar_field<S>::from_int(-1);
  S one = scalar_field<S>::one();
  if constexpr (scalar_field<S>::exact) {
    S i = GaussianRational::i();
    switch (m) {
      case 0: return one;
      case 1: return i;
      case 2: return i2;
      default: return -i;
    }
  } else {
    switch (m) {
      case 0: return one;
      case 1: return Complex(0.0, 1.0);
      case 2: return i2;
      default: return Complex(0.0, -1.0);
    }
  }
}

}  // namespace thodge
