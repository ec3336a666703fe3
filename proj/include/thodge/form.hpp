#pragma once

// Invariant forms: finite linear combinations of coframe monomials with
// coefficients in S.  The coframe is unitary, <phi^i, phi^j> = delta_ij, and
// monomials are orthonormal, which makes every adjoint in the library a
// conjugate transpose.  Maps never store zero coefficients, so exact-mode
// equality is map equality.

#include <map>
#include <stdexcept>
#include <vector>

#include "thodge/multi_index.hpp"
#include "thodge/scalar.hpp"

namespace thodge {

template <class S>
class InvariantForm {
 public:
  using TermMap = std::map<MultiIndexPQ, S, MultiIndexLess>;

  InvariantForm() = default;
  explicit InvariantForm(int n) : n_(n) {
    if (n < 1 || n > kMaxGenerators) throw std::invalid_argument("InvariantForm: bad dimension");
  }

  int n() const { return n_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const MultiIndexPQ& m, const S& c) {
    if (scalar_field<S>::is_zero(c)) return;
    if ((m.holo | m.anti) & ~full_mask(n_)) throw std::invalid_argument("InvariantForm: index out of range");
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (scalar_field<S>::is_zero(it->second)) terms_.erase(it);
    }
  }

  S coeff(const MultiIndexPQ& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? scalar_field<S>::zero() : it->second;
  }

  // True if every term has the given bidegree (the zero form is homogeneous
  // of every bidegree).
  bool homogeneous(int p, int q) const {
    for (const auto& [m, c] : terms_)
      if (m.p() != p || m.q() != q) return false;
    return true;
  }

  InvariantForm& operator+=(const InvariantForm& o) {
    require_same_n(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  InvariantForm& operator-=(const InvariantForm& o) {
    require_same_n(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  InvariantForm& operator*=(const S& s) {
    if (scalar_field<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    prune();
    return *this;
  }

  friend InvariantForm operator+(InvariantForm a, const InvariantForm& b) { return a += b; }
  friend InvariantForm operator-(InvariantForm a, const InvariantForm& b) { return a -= b; }
  friend InvariantForm operator*(const S& s, InvariantForm a) { return a *= s; }
  friend InvariantForm operator-(InvariantForm a) { return a *= scalar_field<S>::from_int(-1); }
  friend bool operator==(const InvariantForm& a, const InvariantForm& b) {
    return a.n_ == b.n_ && a.terms_ == b.terms_;
  }

 private:
  void require_same_n(const InvariantForm& o) const {
    if (n_ != o.n_) throw std::invalid_argument("InvariantForm: dimension mismatch");
  }
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = scalar_field<S>::is_zero(it->second) ? terms_.erase(it) : std::next(it);
  }

  int n_ = 1;
  TermMap terms_;
};

template <class S>
InvariantForm<S> monomial_form(int n, const MultiIndexPQ& m, const S& c) {
  InvariantForm<S> f(n);
  f.add_term(m, c);
  return f;
}

// phi^k as a form (k one-based); conj_generator gives phibar^k.
template <class S>
InvariantForm<S> generator_form(int n, int k) {
  return monomial_form<S>(n, {1u << (k - 1), 0}, scalar_field<S>::one());
}
template <class S>
InvariantForm<S> conj_generator_form(int n, int k) {
  return monomial_form<S>(n, {0, 1u << (k - 1)}, scalar_field<S>::one());
}

// (0,1)- and (1,0)-forms from coefficient vectors (index j holds the
// coefficient of phibar^{j+1} resp. phi^{j+1}).
template <class S>
InvariantForm<S> one_form_01(int n, const std::vector<S>& coeffs) {
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("one_form_01: need n coefficients");
  InvariantForm<S> f(n);
  for (int j = 0; j < n; ++j) f.add_term({0, 1u << j}, coeffs[j]);
  return f;
}
template <class S>
InvariantForm<S> one_form_10(int n, const std::vector<S>& coeffs) {
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("one_form_10: need n coefficients");
  InvariantForm<S> f(n);
  for (int j = 0; j < n; ++j) f.add_term({1u << j, 0}, coeffs[j]);
  return f;
}

// ---- algebra ---------------------------------------------------------------

template <class S>
InvariantForm<S> wedge(const InvariantForm<S>& a, const InvariantForm<S>& b) {
  if (a.n() != b.n()) throw std::invalid_argument("wedge: dimension mismatch");
  InvariantForm<S> out(a.n());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (!disjoint(ma, mb)) continue;
      S c = ca * cb;
      if (wedge_sign(ma, mb) < 0) c = -c;
      out.add_term(mask_union(ma, mb), c);
    }
  return out;
}

// Hermitian inner product, conjugate-linear in the second argument.
template <class S>
S inner(const InvariantForm<S>& a, const InvariantForm<S>& b) {
  if (a.n() != b.n()) throw std::invalid_argument("inner: dimension mismatch");
  S acc = scalar_field<S>::zero();
  const auto& small = a.terms().size() <= b.terms().size() ? a : b;
  const auto& large = (&small == &a) ? b : a;
  for (const auto& [m, c] : small.terms()) {
    S other = large.coeff(m);
    if (scalar_field<S>::is_zero(other)) continue;
    acc += (&small == &a) ? c * scalar_field<S>::conj(other) : other * scalar_field<S>::conj(c);
  }
  return acc;
}

template <class S>
typename scalar_field<S>::real_type norm_sq(const InvariantForm<S>& a) {
  typename scalar_field<S>::real_type acc{};
  for (const auto& [m, c] : a.terms()) acc += scalar_field<S>::norm_sq(c);
  return acc;
}

template <class S>
InvariantForm<S> conj(const InvariantForm<S>& a) {
  InvariantForm<S> out(a.n());
  for (const auto& [m, c] : a.terms()) {
    // Conjugating swaps the lists in place; restoring canonical order moves
    // q new holo factors past p new anti factors.
    S cc = scalar_field<S>::conj(c);
    if ((m.p() * m.q()) & 1) cc = -cc;
    out.add_term({m.anti, m.holo}, cc);
  }
  return out;
}

// Metric adjoint of wedging by a: contract_adjoint(a, v) = (a ^ .)^* v.
// For a (0,1)-form theta this is the contraction i_{theta#} used by the
// twisted operators; for the fundamental form it is the Lefschetz adjoint.
template <class S>
InvariantForm<S> contract_adjoint(const InvariantForm<S>& a, const InvariantForm<S>& v) {
  if (a.n() != v.n()) throw std::invalid_argument("contract_adjoint: dimension mismatch");
  InvariantForm<S> out(a.n());
  for (const auto& [ma, ca] : a.terms()) {
    S cc = scalar_field<S>::conj(ca);
    for (const auto& [mv, cv] : v.terms()) {
      if (!subset_of(ma, mv)) continue;
      MultiIndexPQ rest = mask_difference(mv, ma);
      S c = cc * cv;
      if (wedge_sign(ma, rest) < 0) c = -c;
      out.add_term(rest, c);
    }
  }
  return out;
}

// Volume form: *1.  Equals i^{n^2} times the coefficient-1 top monomial,
// which is the real positively-oriented volume of the underlying metric; for
// even n the factor is +-1 and for n = 2 it is exactly the top monomial.
template <class S>
InvariantForm<S> volume_form(int n) {
  return monomial_form<S>(n, {full_mask(n), full_mask(n)}, unit_imaginary_power<S>(n * n));
}

// Hodge star, complex-linear, fixed by  u ^ *(vbar) = <u,v> vol  on basis
// monomials.  Satisfies ** = (-1)^{k(2n-k)} on degree-k forms.
template <class S>
InvariantForm<S> hodge_star(const InvariantForm<S>& a) {
  const int n = a.n();
  InvariantForm<S> out(n);
  const S in2 = unit_imaginary_power<S>(n * n);
  for (const auto& [m, c] : a.terms()) {
    // nu = conjugate partner monomial of m, comp = its complement; the sign
    // tau makes nu ^ comp the coefficient-1 top monomial.
    MultiIndexPQ nu{m.anti, m.holo};
    MultiIndexPQ comp{full_mask(n) & ~m.anti, full_mask(n) & ~m.holo};
    int sigma = ((m.p() * m.q()) & 1) ? -1 : 1;
    int tau = wedge_sign(nu, comp);
    S coeff = c * in2;
    if (sigma * tau < 0) coeff = -coeff;
    out.add_term(comp, coeff);
  }
  return out;
}

// Residual of the pointwise Clifford identity
// |theta ^ u|^2 + |i_{theta#} u|^2 = |theta|^2 |u|^2 for a (0,1)-form theta.
// Exact zero over Gaussian rationals.
template <class S>
typename scalar_field<S>::real_type pointwise_norm_identity(const InvariantForm<S>& theta,
                                                            const InvariantForm<S>& u) {
  if (!theta.homogeneous(0, 1)) throw std::invalid_argument("pointwise_norm_identity: theta must be a (0,1)-form");
  auto lhs = norm_sq(wedge(theta, u)) + norm_sq(contract_adjoint(theta, u));
  auto rhs = norm_sq(theta) * norm_sq(u);
  return lhs - rhs;
}

}  // namespace thodge
