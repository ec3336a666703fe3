#include "thodge/multi_index.hpp"

namespace thodge {

bool lex_less(std::uint32_t a, std::uint32_t b) {
  // Entries below the lowest differing bit are a shared prefix.  The list
  // owning that bit continues with the smaller element, so it precedes --
  // unless the other list has nothing past the prefix, in which case the
  // shorter list is the smaller one.
  if (a == b) return false;
  std::uint32_t diff = a ^ b;
  std::uint32_t low = diff & ~(diff - 1);
  std::uint32_t above = ~(low | (low - 1));
  if (a & low) return (b & above) != 0;
  return (a & above) == 0;
}

int merge_sign(std::uint32_t a, std::uint32_t b) {
  // Inversions = pairs (x in a, y in b) with x > y: each y in b must jump the
  // a-entries above it.
  int inversions = 0;
  std::uint32_t bb = b;
  while (bb) {
    std::uint32_t low = bb & ~(bb - 1);
    inversions += std::popcount(a & ~(low | (low - 1)));
    bb ^= low;
  }
  return (inversions & 1) ? -1 : 1;
}

int wedge_sign(const MultiIndexPQ& m1, const MultiIndexPQ& m2) {
  int s = (m1.q() * m2.p()) & 1 ? -1 : 1;
  return s * merge_sign(m1.holo, m2.holo) * merge_sign(m1.anti, m2.anti);
}

std::vector<std::uint32_t> combinations(int n, int k) {
  std::vector<std::uint32_t> out;
  if (k < 0 || k > n) return out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  // Standard odometer on ascending index arrays; emits lexicographic order.
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::uint32_t mask = 0;
    for (int i : idx) mask |= 1u << i;
    out.push_back(mask);
    int j = k - 1;
    while (j >= 0 && idx[j] == n - k + j) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
  return out;
}

std::vector<MultiIndexPQ> bidegree_basis(int n, int p, int q) {
  std::vector<MultiIndexPQ> out;
  for (std::uint32_t h : combinations(n, p))
    for (std::uint32_t a : combinations(n, q)) out.push_back({h, a});
  return out;
}

std::vector<int> mask_indices(std::uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; i < kMaxGenerators; ++i)
    if (mask & (1u << i)) out.push_back(i + 1);
  return out;
}

std::string to_string(const MultiIndexPQ& m) {
  if (m.holo == 0 && m.anti == 0) return "1";
  auto list = [](std::uint32_t mask) {
    std::string s;
    for (int i : mask_indices(mask)) {
      if (!s.empty()) s += ',';
      s += std::to_string(i);
    }
    return s;
  };
  std::string s;
  if (m.holo) s += "phi^{" + list(m.holo) + "}";
  if (m.anti) {
    if (!s.empty()) s += ' ';
    s += "phibar^{" + list(m.anti) + "}";
  }
  return s;
}

}  // namespace thodge
