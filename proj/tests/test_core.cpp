#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "thodge/matrix.hpp"
#include "thodge/multi_index.hpp"
#include "thodge/scalar.hpp"

using namespace thodge;

// ---- oracles ----------------------------------------------------------------

namespace {

std::vector<int> mask_to_list(std::uint32_t m) {
  std::vector<int> out;
  for (int i = 0; i < kMaxGenerators; ++i)
    if (m & (1u << i)) out.push_back(i + 1);
  return out;
}

// Parity of the permutation sorting `v` ascending, or 0 if duplicates occur.
// Counts inversions directly; no shortcuts shared with the library.
int sort_sign_oracle(std::vector<int> v) {
  int sign = 1;
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = i + 1; j < v.size(); ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) sign = -sign;
    }
  return sign;
}

// Wedge sign of two monomials via flattened generator lists: holomorphic
// generator k is slot k, conjugate generator k is slot n + k, concatenate and
// count inversions.
int wedge_sign_oracle(const MultiIndexPQ& a, const MultiIndexPQ& b, int n) {
  std::vector<int> slots;
  for (int g : mask_to_list(a.holo)) slots.push_back(g);
  for (int g : mask_to_list(a.anti)) slots.push_back(n + g);
  for (int g : mask_to_list(b.holo)) slots.push_back(g);
  for (int g : mask_to_list(b.anti)) slots.push_back(n + g);
  return sort_sign_oracle(slots);
}

bool lex_less_oracle(std::uint32_t a, std::uint32_t b) {
  auto la = mask_to_list(a), lb = mask_to_list(b);
  return std::lexicographical_compare(la.begin(), la.end(), lb.begin(), lb.end());
}

// Exact rank by plain Gaussian elimination with division, the slow textbook
// route, as a cross-check on the fraction-free path.
int rank_oracle(Matrix<GaussianRational> m) {
  int rank = 0;
  for (int col = 0; col < m.cols() && rank < m.rows(); ++col) {
    int piv = -1;
    for (int r = rank; r < m.rows(); ++r)
      if (!m(r, col).is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    for (int j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rank, j));
    GaussianRational inv = GaussianRational(1) / m(rank, col);
    for (int j = col; j < m.cols(); ++j) m(rank, j) *= inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, col).is_zero()) continue;
      GaussianRational f = m(r, col);
      for (int j = col; j < m.cols(); ++j) m(r, j) -= f * m(rank, j);
    }
    ++rank;
  }
  return rank;
}

GaussianRational random_gq(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  GaussianRational g;
  g.re = Rational(num(rng), den(rng));
  g.im = Rational(num(rng), den(rng));
  return g;
}

}  // namespace

// ---- scalars ----------------------------------------------------------------

TEST_CASE("gaussian rational field arithmetic") {
  GaussianRational a, b;
  a.re = Rational(1, 2);
  a.im = Rational(-3, 4);
  b.re = Rational(2);
  b.im = Rational(1, 3);

  CHECK((a + b) - b == a);
  CHECK(a * b == b * a);
  CHECK((a * b) / b == a);
  CHECK(a * GaussianRational::i() * GaussianRational::i() == -a);
  CHECK(a.conj().conj() == a);
  CHECK((a * a.conj()).im == 0);
  CHECK(a.norm_sq() == Rational(1, 4) + Rational(9, 16));
  CHECK_THROWS_AS(a / GaussianRational(0), std::domain_error);

  std::mt19937 rng(7);
  for (int it = 0; it < 200; ++it) {
    GaussianRational x = random_gq(rng), y = random_gq(rng), z = random_gq(rng);
    CHECK(x * (y + z) == x * y + x * z);
    CHECK((x * y).conj() == x.conj() * y.conj());
    if (!y.is_zero()) CHECK((x / y) * y == x);
  }
}

TEST_CASE("unit imaginary powers cycle with period four") {
  for (int k = -9; k <= 9; ++k) {
    auto v = unit_imaginary_power<GaussianRational>(k);
    auto w = unit_imaginary_power<GaussianRational>(k + 4);
    CHECK(v == w);
  }
  CHECK(unit_imaginary_power<GaussianRational>(0) == GaussianRational(1));
  CHECK(unit_imaginary_power<GaussianRational>(1) == GaussianRational::i());
  CHECK(unit_imaginary_power<GaussianRational>(2) == GaussianRational(-1));
  CHECK(unit_imaginary_power<GaussianRational>(3) == -GaussianRational::i());
  CHECK(unit_imaginary_power<Complex>(5) == Complex(0, 1));
}

TEST_CASE("gaussian rational parser round trips") {
  const char* samples[] = {"0",    "1",        "-1",     "i",          "-i",        "3/4",
                           "-3/4", "1/2+1/3i", "2-5/7i", "-1/2-1/2i",  "5i",        "1+i"};
  for (const char* s : samples) {
    auto v = parse_gaussian_rational(s);
    REQUIRE(v.has_value());
    auto back = parse_gaussian_rational(to_string(*v));
    REQUIRE(back.has_value());
    CHECK(*back == *v);
  }
  auto v = parse_gaussian_rational("1/2+1/3i");
  REQUIRE(v);
  CHECK(v->re == Rational(1, 2));
  CHECK(v->im == Rational(1, 3));
  CHECK(!parse_gaussian_rational("1/0"));
  CHECK(!parse_gaussian_rational("2x"));
  CHECK(!parse_gaussian_rational(""));
  CHECK(!parse_gaussian_rational("1+2"));
}

TEST_CASE("complex parser accepts decimals and exact forms") {
  auto a = parse_complex("0.5-1.25i");
  REQUIRE(a);
  CHECK(a->real() == doctest::Approx(0.5));
  CHECK(a->imag() == doctest::Approx(-1.25));
  auto b = parse_complex("1/2+1/2i");
  REQUIRE(b);
  CHECK(b->real() == doctest::Approx(0.5));
  CHECK(b->imag() == doctest::Approx(0.5));
  auto c = parse_complex("1e-3i");
  REQUIRE(c);
  CHECK(c->imag() == doctest::Approx(1e-3));
  CHECK(!parse_complex("nonsense"));
}

// ---- multi indices ----------------------------------------------------------

TEST_CASE("ascending-list lexicographic order matches the list oracle") {
  for (std::uint32_t a = 0; a < 64; ++a)
    for (std::uint32_t b = 0; b < 64; ++b) CHECK(lex_less(a, b) == lex_less_oracle(a, b));
}

TEST_CASE("wedge sign agrees with the inversion-count oracle") {
  const int n = 3;
  std::vector<MultiIndexPQ> all;
  for (std::uint32_t h = 0; h < 8; ++h)
    for (std::uint32_t an = 0; an < 8; ++an) all.push_back({h, an});
  for (const auto& a : all)
    for (const auto& b : all) {
      if (!disjoint(a, b)) continue;
      CHECK(wedge_sign(a, b) == wedge_sign_oracle(a, b, n));
    }
}

TEST_CASE("merge sign is antisymmetric in the degree-parity sense") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<std::uint32_t> mask(0, 255);
  int tested = 0;
  while (tested < 300) {
    std::uint32_t a = mask(rng), b = mask(rng);
    if (a & b) continue;
    ++tested;
    int pa = std::popcount(a), pb = std::popcount(b);
    int expect = ((pa * pb) & 1) ? -merge_sign(b, a) : merge_sign(b, a);
    CHECK(merge_sign(a, b) == expect);
  }
}

TEST_CASE("combinations enumerate in lexicographic order") {
  auto c = combinations(5, 2);
  CHECK(c.size() == 10);
  for (size_t i = 0; i + 1 < c.size(); ++i) CHECK(lex_less(c[i], c[i + 1]));
  for (auto m : c) CHECK(std::popcount(m) == 2);
  CHECK(combinations(4, 0).size() == 1);
  CHECK(combinations(4, 4).size() == 1);
  CHECK(combinations(4, 5).empty());
}

TEST_CASE("bidegree basis is ordered holomorphic-major") {
  auto basis = bidegree_basis(3, 2, 1);
  CHECK(basis.size() == 9);
  for (const auto& m : basis) {
    CHECK(m.p() == 2);
    CHECK(m.q() == 1);
  }
  for (size_t i = 0; i + 1 < basis.size(); ++i) {
    const auto &a = basis[i], &b = basis[i + 1];
    bool ordered = lex_less(a.holo, b.holo) || (a.holo == b.holo && lex_less(a.anti, b.anti));
    CHECK(ordered);
  }
  CHECK(bidegree_basis(2, 3, 0).empty());
}

TEST_CASE("monomial printing") {
  CHECK(to_string(MultiIndexPQ{0, 0}) == "1");
  CHECK(to_string(MultiIndexPQ{0b101, 0b10}) == "phi^{1,3} phibar^{2}");
}

// ---- matrices ---------------------------------------------------------------

TEST_CASE("fraction-free rank matches textbook elimination on random matrices") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> dim(1, 7), rk(0, 4);
  for (int it = 0; it < 120; ++it) {
    int m = dim(rng), n = dim(rng), r = std::min({rk(rng), m, n});
    // Build an exact rank-r matrix as a product of full-rank factors.
    Matrix<GaussianRational> a(m, r), b(r, n);
    for (int i = 0; i < r; ++i) {
      a(i, i) = GaussianRational(1);
      b(i, i) = GaussianRational(1);
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < r; ++j) a(i, j) += random_gq(rng) * random_gq(rng);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) b(i, j) += random_gq(rng);
    Matrix<GaussianRational> prod = a * b;
    int br = bareiss_rank(prod);
    CHECK(br == rank_oracle(prod));
    CHECK(br <= r);
    CHECK(nullity(prod) == n - br);
  }
}

TEST_CASE("rank of curated matrices") {
  Matrix<GaussianRational> z(3, 4);
  CHECK(bareiss_rank(z) == 0);
  CHECK(bareiss_rank(Matrix<GaussianRational>::identity(5)) == 5);

  // Row three is the sum of rows one and two.
  Matrix<GaussianRational> m(3, 3);
  int vals[2][3] = {{1, 2, 3}, {4, 5, 6}};
  for (int j = 0; j < 3; ++j) {
    m(0, j) = GaussianRational(vals[0][j]);
    m(1, j) = GaussianRational(vals[1][j]);
    m(2, j) = m(0, j) + m(1, j);
  }
  CHECK(bareiss_rank(m) == 2);

  // Complex entries: [[1, i], [i, -1]] has rank one.
  Matrix<GaussianRational> c(2, 2);
  c(0, 0) = GaussianRational(1);
  c(0, 1) = GaussianRational::i();
  c(1, 0) = GaussianRational::i();
  c(1, 1) = GaussianRational(-1);
  CHECK(bareiss_rank(c) == 1);
}

TEST_CASE("conjugate transpose and product shapes") {
  Matrix<GaussianRational> m(2, 3);
  m(0, 1) = GaussianRational::i();
  m(1, 2) = GaussianRational(2);
  auto h = m.conj_transpose();
  CHECK(h.rows() == 3);
  CHECK(h(1, 0) == -GaussianRational::i());
  auto g = h * m;  // Gram matrix is Hermitian
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(g(i, j) == g(j, i).conj());
}

TEST_CASE("numeric rank agrees with exact rank after conversion") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> dim(1, 6), rk(0, 3);
  for (int it = 0; it < 40; ++it) {
    int m = dim(rng), n = dim(rng), r = std::min({rk(rng), m, n});
    Matrix<GaussianRational> a(m, r), b(r, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < r; ++j) a(i, j) = random_gq(rng);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = random_gq(rng);
    Matrix<GaussianRational> prod = a * b;
    CHECK(numeric_rank(to_eigen(prod)) == bareiss_rank(prod));
  }
}

TEST_CASE("hermitian kernel count flags ambiguous spectra") {
  EigenC clean = EigenC::Zero(3, 3);
  clean(0, 0) = 1.0;
  clean(1, 1) = 2.0;
  auto k = hermitian_kernel_count(clean);
  CHECK(k.dim == 1);
  CHECK(k.determinate);

  EigenC zero = EigenC::Zero(4, 4);
  auto kz = hermitian_kernel_count(zero);
  CHECK(kz.dim == 4);
  CHECK(kz.determinate);

  // Eigenvalue just below the drop threshold with no gap to the next one.
  EigenC fuzzy = EigenC::Zero(3, 3);
  fuzzy(0, 0) = 0.9e-8;
  fuzzy(1, 1) = 2.0e-8;
  fuzzy(2, 2) = 1.0;
  auto kf = hermitian_kernel_count(fuzzy);
  CHECK(kf.dim == 1);
  CHECK(!kf.determinate);
}
