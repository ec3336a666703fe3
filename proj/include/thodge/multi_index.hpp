#pragma once

// Basis monomials of the complexified exterior algebra over a unitary coframe
// phi^1..phi^n, phibar^1..phibar^n.  A monomial is
//
//   phi^{i1} ^ ... ^ phi^{ip} ^ phibar^{j1} ^ ... ^ phibar^{jq}
//
// with both index lists strictly ascending; that ordering is the canonical
// form every routine returns.  Index sets are stored as bitmasks (bit i-1 for
// index i), so permutation parities reduce to popcounts.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace thodge {

constexpr int kMaxGenerators = 16;  // complex dimension cap; models use n <= 4

struct MultiIndexPQ {
  std::uint32_t holo = 0;
  std::uint32_t anti = 0;

  int p() const { return std::popcount(holo); }
  int q() const { return std::popcount(anti); }
  int degree() const { return p() + q(); }

  friend bool operator==(const MultiIndexPQ&, const MultiIndexPQ&) = default;
};

// Ascending-list lexicographic order, holo list first.  For ascending subsets
// of a fixed universe, list-lex order coincides with colex on the reversed
// complement, but NOT with numeric mask order; compare via the lists.
bool lex_less(std::uint32_t a, std::uint32_t b);

struct MultiIndexLess {
  bool operator()(const MultiIndexPQ& a, const MultiIndexPQ& b) const {
    if (a.holo != b.holo) return lex_less(a.holo, b.holo);
    return lex_less(a.anti, b.anti);
  }
};

// (-1)^{inversions} needed to merge two disjoint ascending lists a, b into
// one ascending list with a's entries written first.
int merge_sign(std::uint32_t a, std::uint32_t b);

// Sign of m1 ^ m2 relative to the canonical monomial on the union, assuming
// disjoint index sets: factors of m2's holo part cross m1's anti part, then
// both pairs of like-type lists are merged.
int wedge_sign(const MultiIndexPQ& m1, const MultiIndexPQ& m2);

inline bool disjoint(const MultiIndexPQ& a, const MultiIndexPQ& b) {
  return (a.holo & b.holo) == 0 && (a.anti & b.anti) == 0;
}

inline bool subset_of(const MultiIndexPQ& a, const MultiIndexPQ& b) {
  return (a.holo & ~b.holo) == 0 && (a.anti & ~b.anti) == 0;
}

inline MultiIndexPQ mask_union(const MultiIndexPQ& a, const MultiIndexPQ& b) {
  return {a.holo | b.holo, a.anti | b.anti};
}

inline MultiIndexPQ mask_difference(const MultiIndexPQ& a, const MultiIndexPQ& b) {
  return {a.holo & ~b.holo, a.anti & ~b.anti};
}

inline std::uint32_t full_mask(int n) { return (1u << n) - 1u; }

// All k-subsets of {1..n} in ascending-list lexicographic order.
std::vector<std::uint32_t> combinations(int n, int k);

// Basis of (p,q)-monomials, outer loop holo, inner loop anti, each in
// lexicographic order.  This is the column/row order of every operator block.
std::vector<MultiIndexPQ> bidegree_basis(int n, int p, int q);

// One-based index list of a mask, ascending.
std::vector<int> mask_indices(std::uint32_t mask);

// Printable form like "phi^{1,3} phibar^{2}"; "1" for the empty monomial.
std::string to_string(const MultiIndexPQ& m);

}  // namespace thodge
