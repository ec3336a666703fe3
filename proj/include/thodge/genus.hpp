#pragma once

// Hodge tables and genus bookkeeping: the chi_y polynomial and its special
// values, fixed-point sums, the transverse-dimension tables of Vaisman
// geometry, and the flat-model telescoping replay.  Pure integer arithmetic.

#include <string>
#include <vector>

#include "thodge/twisted.hpp"

namespace thodge {

struct HodgeTable {
  int n = 1;
  std::vector<std::vector<int>> h;  // h[p][q], 0 <= p,q <= n

  HodgeTable() = default;
  explicit HodgeTable(int n_) : n(n_), h(static_cast<size_t>(n_) + 1, std::vector<int>(static_cast<size_t>(n_) + 1, 0)) {}

  static HodgeTable from_cohomology(const CohomologyTable& table);

  int at(int p, int q) const {
    if (p < 0 || q < 0 || p > n || q > n) return 0;
    return h[static_cast<size_t>(p)][static_cast<size_t>(q)];
  }
  int& at(int p, int q) { return h[static_cast<size_t>(p)][static_cast<size_t>(q)]; }

  friend bool operator==(const HodgeTable& a, const HodgeTable& b) { return a.n == b.n && a.h == b.h; }
};

struct ChiPolynomial {
  std::vector<long long> coeffs;  // chi_0 .. chi_n

  long long value_at(long long y) const {
    long long acc = 0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * y + coeffs[i];
    return acc;
  }
  bool is_zero() const {
    for (long long c : coeffs)
      if (c != 0) return false;
    return true;
  }
  friend bool operator==(const ChiPolynomial& a, const ChiPolynomial& b);
};

std::string to_string(const ChiPolynomial& poly);

// chi_p = sum_q (-1)^q h^{p,q}.
ChiPolynomial chi(const HodgeTable& table);

// Special values of chi_y.  The y=1 number only carries its signature meaning
// on Kahler manifolds of even complex dimension; the caveat flag records
// whether the caller declared that, it is never inferred.
struct ChiSpecialValues {
  long long arithmetic_genus = 0;  // y = 0
  long long y_one = 0;             // y = 1
  bool signature_caveat = true;    // true unless declared Kahler of even complex dimension
  long long euler_number = 0;      // y = -1
};
ChiSpecialValues chi_special_values(const ChiPolynomial& poly, bool kahler_even_dim = false);

// sum over fixed points of (-y)^s with 0 <= s <= n; empty data gives the zero
// polynomial (no zeros of the field at all).
ChiPolynomial kosniowski_sum(const std::vector<int>& s_values, int n);

// Convolution table of a product: h^{p,q} = sum h_a^{a,b} h_b^{p-a,q-b}.
HodgeTable kunneth_product(const HodgeTable& a, const HodgeTable& b);

// ---- transverse dimension tables ---------------------------------------------

struct STable {
  int n = 1;                        // ambient complex dimension
  std::vector<std::vector<int>> s;  // s[a][b], 0 <= a,b <= n-1

  STable() = default;
  explicit STable(int n_) : n(n_), s(static_cast<size_t>(n_), std::vector<int>(static_cast<size_t>(n_), 0)) {}

  int at(int a, int b) const {
    if (a < 0 || b < 0 || a >= n || b >= n) return 0;
    return s[static_cast<size_t>(a)][static_cast<size_t>(b)];
  }
  int& at(int a, int b) { return s[static_cast<size_t>(a)][static_cast<size_t>(b)]; }
  bool symmetric() const;
};

// Hodge numbers of a structure whose transverse dims are st:
// h^{p,q} = s^{p,q} + s^{p,q-1} below the antidiagonal (p+q <= n-1),
// h^{p,q} = s^{p-1,n-p} + s^{p,n-p-1} on it, and duality h^{p,q} = h^{n-p,n-q}
// above.  Requires a symmetric table; the chi_y polynomial of the result is
// identically zero and that is asserted.
HodgeTable vaisman_hodge(const STable& st);

// Per-p alternating sums rebuilt from the four-term primitive decomposition
// on a flat model; each entry telescopes to zero.
std::vector<int> parallel_decomposition_chi(const LieComplexModel& model, const FormQ& theta);

// ---- serialization -----------------------------------------------------------

std::string to_json(const HodgeTable& table);
std::string to_csv(const HodgeTable& table);
std::string to_json(const STable& st);
std::string to_csv(const STable& st);
HodgeTable hodge_table_from_json(const std::string& text);
STable stable_from_json(const std::string& text);

}  // namespace thodge
