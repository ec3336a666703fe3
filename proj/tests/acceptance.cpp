// Acceptance suite: one criterion per numbered line, exit code = number of
// failed criteria.  Each criterion states an exact or toleranced property of
// the twisted-cohomology machinery; tolerances and runtime caps are part of
// the criterion and are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thodge/curvature.hpp"
#include "thodge/fourier.hpp"
#include "thodge/genus.hpp"
#include "thodge/model.hpp"
#include "thodge/twisted.hpp"

using namespace thodge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Harness {
  int failed = 0;

  void criterion(int id, const std::string& what,
                 const std::function<void(std::vector<std::string>&)>& body) {
    std::vector<std::string> problems;
    try {
      body(problems);
    } catch (const std::exception& e) {
      problems.push_back(std::string("unexpected exception: ") + e.what());
    }
    std::printf("criterion %2d: %s  %s\n", id, problems.empty() ? "PASS" : "FAIL", what.c_str());
    for (const std::string& p : problems) std::printf("              - %s\n", p.c_str());
    if (!problems.empty()) ++failed;
    std::fflush(stdout);
  }
};

#define EXPECT(cond, detail)                    \
  do {                                          \
    if (!(cond)) problems.push_back((detail)); \
  } while (0)

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

GaussianRational random_gq(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-3, 3), den(1, 2);
  GaussianRational g;
  g.re = Rational(num(rng), den(rng));
  g.im = Rational(num(rng), den(rng));
  return g;
}

FormQ random_form(std::mt19937& rng, int n, int p, int q, int terms) {
  FormQ f(n);
  const std::vector<MultiIndexPQ> basis = bidegree_basis(n, p, q);
  std::uniform_int_distribution<std::size_t> pick(0, basis.size() - 1);
  for (int t = 0; t < terms; ++t) f.add_term(basis[pick(rng)], random_gq(rng));
  return f;
}

// theta = sum f_j dx_j + g_j dy_j in the complex coframe:
// dx_j = (phi^j + phibar^j)/2, dy_j = -i(phi^j - phibar^j)/2.
FormQ real_form_from_xy(int n, const std::vector<Rational>& f, const std::vector<Rational>& g) {
  FormQ out(n);
  for (int j = 0; j < n; ++j) {
    out.add_term({1u << j, 0}, GaussianRational(f[static_cast<std::size_t>(j)] / 2,
                                                -g[static_cast<std::size_t>(j)] / 2));
    out.add_term({0, 1u << j}, GaussianRational(f[static_cast<std::size_t>(j)] / 2,
                                                g[static_cast<std::size_t>(j)] / 2));
  }
  return out;
}

// The band-limited twist (2 + cos 2 pi x_1) dzbar_1 used by the spectral
// criteria.
FourierField banded_twist() {
  FourierForm f(1);
  const MultiIndexPQ mono{0u, 1u};
  f.add(Mode{0, 0}, mono, Complex(2.0, 0.0));
  f.add(Mode{1, 0}, mono, Complex(0.5, 0.0));
  f.add(Mode{-1, 0}, mono, Complex(0.5, 0.0));
  return FourierField(f);
}

FourierForm random_banded_form(std::mt19937& rng, int n, int band, int terms) {
  std::vector<MultiIndexPQ> pool;
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q)
      for (const MultiIndexPQ& m : bidegree_basis(n, p, q)) pool.push_back(m);
  std::uniform_int_distribution<int> kd(-band, band);
  std::uniform_int_distribution<std::size_t> md(0, pool.size() - 1);
  std::uniform_real_distribution<double> cd(-1.0, 1.0);
  FourierForm u(n);
  for (int i = 0; i < terms; ++i) {
    Mode k(static_cast<std::size_t>(2 * n));
    for (auto& v : k) v = kd(rng);
    u.add(k, pool[md(rng)], Complex(cd(rng), cd(rng)));
  }
  return u;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int main() {
  Harness h;

  h.criterion(
      1, "twisted cohomology of flat tori vanishes; untwisted tables are binomial; < 5 s",
      [](std::vector<std::string>& problems) {
        const auto t0 = Clock::now();
        for (int n = 1; n <= 3; ++n) {
          const LieComplexModel model = torus_model(n);
          const FormQ theta = model.theta_examples.at("phi_bar_1");
          const CohomologyTable tw = twisted_hodge_table(model, theta, "phi_bar_1");
          for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q)
              EXPECT(tw.dim(p, q) == 0, "n=" + std::to_string(n) + ": twisted dim at (" +
                                            std::to_string(p) + "," + std::to_string(q) +
                                            ") is " + std::to_string(tw.dim(p, q)) +
                                            ", expected 0");
          const CohomologyTable un = twisted_hodge_table(model, FormQ(n), "0");
          for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q)
              EXPECT(un.dim(p, q) == binom(n, p) * binom(n, q),
                     "n=" + std::to_string(n) + ": untwisted dim at (" + std::to_string(p) + "," +
                         std::to_string(q) + ") is " + std::to_string(un.dim(p, q)) +
                         ", expected " + std::to_string(binom(n, p) * binom(n, q)));
        }
        const double sec = seconds_since(t0);
        EXPECT(sec < 5.0, "runtime " + fmt(sec) + " s exceeds the 5 s cap");
      });

  h.criterion(
      2, "alternating sums per degree are twist-independent and equal the operator index",
      [](std::vector<std::string>& problems) {
        for (const LieComplexModel& model : {torus_model(2), kodaira_thurston()}) {
          const FormQ theta = model.theta_examples.at("phi_bar_1");
          const CohomologyTable un = twisted_hodge_table(model, FormQ(model.n), "0");
          const CohomologyTable tw = twisted_hodge_table(model, theta, "phi_bar_1");
          for (int p = 0; p <= model.n; ++p) {
            int e_un = 0, e_tw = 0;
            for (int q = 0; q <= model.n; ++q) {
              const int sign = (q % 2 == 0) ? 1 : -1;
              e_un += sign * un.dim(p, q);
              e_tw += sign * tw.dim(p, q);
            }
            EXPECT(e_un == e_tw, model.name + " p=" + std::to_string(p) + ": untwisted sum " +
                                     std::to_string(e_un) + " != twisted sum " +
                                     std::to_string(e_tw));
            for (const int t : {0, 1, 5}) {
              const int idx = dirac_index(dirac_assemble(model, theta, p, GaussianRational(t)));
              EXPECT(idx == e_un, model.name + " p=" + std::to_string(p) + " t=" +
                                      std::to_string(t) + ": operator index " +
                                      std::to_string(idx) + " != alternating sum " +
                                      std::to_string(e_un));
            }
          }
        }
      });

  h.criterion(3, "degree-zero twisted cohomology vanishes on the torus and the nilmanifold",
              [](std::vector<std::string>& problems) {
                for (const LieComplexModel& model : {torus_model(2), kodaira_thurston()}) {
                  const FormQ theta = model.theta_examples.at("phi_bar_1");
                  const int h0 = h0_twisted(model, theta);
                  EXPECT(h0 == 0, model.name + ": twisted degree-zero dimension is " +
                                      std::to_string(h0) + ", expected 0");
                  const CohomologyTable tw = twisted_hodge_table(model, theta, "phi_bar_1");
                  EXPECT(tw.dim(0, 0) == 0, model.name + ": table entry (0,0) is " +
                                                std::to_string(tw.dim(0, 0)) + ", expected 0");
                }
              });

  h.criterion(
      4, "Laplacian commutators vanish; dims decompose through primitive parts; sums vanish",
      [](std::vector<std::string>& problems) {
        for (int n = 2; n <= 3; ++n) {
          const LieComplexModel model = torus_model(n);
          const FormQ theta = model.theta_examples.at("phi_bar_1");
          const double cmax = commutator_check(model, theta);
          EXPECT(cmax == 0.0,
                 "n=" + std::to_string(n) + ": max commutator entry " + fmt(cmax) + " != 0");
          for (int p = 0; p <= n; ++p)
            for (int q = 0; q <= n; ++q) {
              const PrimitiveDecomposition d = primitive_decomposition(model, theta, p, q);
              const int sum = d.s_pq + d.s_pm1_q + d.s_p_qm1 + d.s_pm1_qm1;
              EXPECT(d.reconstructed && d.h_pq == sum,
                     "n=" + std::to_string(n) + " (" + std::to_string(p) + "," +
                         std::to_string(q) + "): h=" + std::to_string(d.h_pq) +
                         " but the four primitive parts sum to " + std::to_string(sum));
            }
          const std::vector<int> chis = parallel_decomposition_chi(model, theta);
          for (std::size_t p = 0; p < chis.size(); ++p)
            EXPECT(chis[p] == 0, "n=" + std::to_string(n) + ": alternating sum at degree " +
                                     std::to_string(p) + " is " + std::to_string(chis[p]));
        }
      });

  h.criterion(
      5, "randomized integral identities on the truncated torus stay below 1e-9; < 30 s",
      [](std::vector<std::string>& problems) {
        const auto t0 = Clock::now();
        const TorusSpec spec{1, 4};
        const FourierField field = banded_twist();
        const int band = spec.cutoff - field.band();
        std::mt19937 rng(424243);
        double max_pair = 0.0, max_div = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
          const FourierForm u = random_banded_form(rng, 1, band, 6);
          const FourierForm v = random_banded_form(rng, 1, band, 6);
          max_pair = std::max(max_pair, lie_identity_check(spec, field, u, v).residual);
          max_div = std::max(max_div, divergence_identity_check(spec, field, u).residual);
        }
        EXPECT(max_pair <= 1e-9,
               "pairing-identity residual " + fmt(max_pair) + " exceeds 1e-9");
        EXPECT(max_div <= 1e-9,
               "divergence-identity residual " + fmt(max_div) + " exceeds 1e-9");
        const double sec = seconds_since(t0);
        EXPECT(sec < 30.0, "runtime " + fmt(sec) + " s exceeds the 30 s cap");
      });

  h.criterion(
      6, "a kernel-vanishing witness exists with sigma_min > 1e-6, stable across cutoffs 4 and 6",
      [](std::vector<std::string>& problems) {
        const TorusSpec spec{1, 4};
        const ScanResult res =
            sigma_min_scan(spec, banded_twist(), 0, {0.5, 1.0, 2.0, 4.0, 8.0, 16.0});
        EXPECT(res.refined_cutoff == 6, "refinement cutoff is " +
                                            std::to_string(res.refined_cutoff) + ", expected 6");
        if (!res.witness_t()) {
          problems.push_back("no witness found on the grid {0.5,1,2,4,8,16}");
          return;
        }
        const ScanPoint& w = res.points[static_cast<std::size_t>(res.witness_index)];
        for (const double s : {w.sigma_even, w.sigma_odd, w.sigma_even_refined,
                               w.sigma_odd_refined})
          EXPECT(s > 1e-6, "witness t* = " + fmt(w.t) + ": sigma_min " + fmt(s) +
                               " is not above the 1e-6 floor");
        const double rel_even =
            std::abs(w.sigma_even - w.sigma_even_refined) / std::abs(w.sigma_even_refined);
        const double rel_odd =
            std::abs(w.sigma_odd - w.sigma_odd_refined) / std::abs(w.sigma_odd_refined);
        EXPECT(rel_even < 1e-3, "even-parity sigma_min moved by " + fmt(rel_even) +
                                    " relative between cutoffs 4 and 6");
        EXPECT(rel_odd < 1e-3, "odd-parity sigma_min moved by " + fmt(rel_odd) +
                                   " relative between cutoffs 4 and 6");
        EXPECT(w.stable, "the scan did not flag the witness point as cutoff-stable");
      });

  h.criterion(
      7, "normalized surface model is Gauduchon with scalar invariant exactly 1; torus gives 0",
      [](std::vector<std::string>& problems) {
        const LeeFormResult hopf = lee_form(hopf_surface(), fundamental_form(2));
        EXPECT(hopf.gauduchon, "surface model: the codifferential of the Lee form is nonzero");
        EXPECT(hopf.theta_norm_sq == Rational(1),
               "surface model: |theta|^2 != 1, the model is not normalized");
        EXPECT(hopf.s_j == GaussianRational(1), "surface model: scalar invariant != 1");

        const LeeFormResult torus = lee_form(torus_model(2), fundamental_form(2));
        EXPECT(torus.tau.is_zero(), "torus: torsion form is nonzero");
        EXPECT(torus.theta.is_zero(), "torus: Lee form is nonzero");
        EXPECT(torus.s_j.is_zero(), "torus: scalar invariant is nonzero");
        EXPECT(torus.gauduchon, "torus: Gauduchon check failed");
      });

  h.criterion(
      8, "fixed-point counts reproduce the chi polynomials of the line and its square",
      [](std::vector<std::string>& problems) {
        HodgeTable cp1(1);
        cp1.at(0, 0) = 1;
        cp1.at(1, 1) = 1;
        const ChiPolynomial line = kosniowski_sum({0, 1}, 1);
        EXPECT(line == (ChiPolynomial{{1, -1}}), "counts {0,1} gave " + to_string(line) +
                                                     ", expected 1 - y");
        EXPECT(line == chi(cp1), "counts {0,1} disagree with the line's table polynomial");
        const ChiPolynomial square = kosniowski_sum({0, 1, 1, 2}, 2);
        EXPECT(square == chi(kunneth_product(cp1, cp1)),
               "counts {0,1,1,2} disagree with the product-table polynomial " +
                   to_string(chi(kunneth_product(cp1, cp1))));
      });

  h.criterion(
      9, "transverse bookkeeping matches the surface table; random symmetric tables give chi = 0",
      [](std::vector<std::string>& problems) {
        STable st(2);
        st.at(0, 0) = 1;
        const HodgeTable ht = vaisman_hodge(st);
        HodgeTable expected(2);
        expected.at(0, 0) = expected.at(0, 1) = expected.at(2, 1) = expected.at(2, 2) = 1;
        EXPECT(ht == expected, "unit transverse table did not produce the four expected ones");
        const HodgeTable inv =
            HodgeTable::from_cohomology(twisted_hodge_table(hopf_surface(), FormQ(2), "0"));
        EXPECT(ht == inv, "bookkeeping table disagrees with the exact surface computation");
        bool serre = true;
        for (int p = 0; p <= 2; ++p)
          for (int q = 0; q <= 2; ++q)
            if (ht.at(p, q) != ht.at(2 - p, 2 - q)) serre = false;
        EXPECT(serre, "h^{p,q} != h^{n-p,n-q} somewhere in the surface table");
        EXPECT(chi(ht).is_zero(), "surface chi polynomial " + to_string(chi(ht)) + " != 0");

        std::mt19937 rng(909090);
        std::uniform_int_distribution<int> nd(1, 4), vd(0, 5);
        int bad = 0;
        for (int trial = 0; trial < 1000; ++trial) {
          const int n = nd(rng);
          STable s(n);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b <= a; ++b) s.at(a, b) = s.at(b, a) = vd(rng);
          if (!chi(vaisman_hodge(s)).is_zero()) ++bad;
        }
        EXPECT(bad == 0, std::to_string(bad) +
                             " of 1000 random symmetric transverse tables had nonzero chi");
      });

  h.criterion(
      10, "exterior-algebra laws hold exactly on 500 random instances",
      [](std::vector<std::string>& problems) {
        std::mt19937 rng(101010);
        std::uniform_int_distribution<int> nd(1, 4), num(-4, 4), den(1, 3);
        int adj = 0, norm = 0, star = 0, split_bad = 0, pos = 0;
        for (int trial = 0; trial < 500; ++trial) {
          const int n = nd(rng);
          std::uniform_int_distribution<int> deg(0, n);
          const int p = deg(rng), q = deg(rng);
          const FormQ theta = random_form(rng, n, 0, 1, n);
          const FormQ u = random_form(rng, n, p, q, 4);

          const FormQ v = random_form(rng, n, p, std::min(q + 1, n), 4);
          if (inner(wedge(theta, u), v) != inner(u, contract_adjoint(theta, v))) ++adj;

          if (!(pointwise_norm_identity(theta, u) == 0)) ++norm;

          FormQ uu = hodge_star(hodge_star(u));
          const int k = p + q;
          if ((k * (2 * n - k)) & 1) uu *= GaussianRational(-1);
          if (!(uu == u)) ++star;

          std::vector<Rational> f, g;
          for (int j = 0; j < n; ++j) {
            f.emplace_back(num(rng), den(rng));
            g.emplace_back(num(rng), den(rng));
          }
          const RealOneFormSplit sp = split_real_one_form(n, f, g);
          if (!(sp.part_10 + sp.part_01 == real_form_from_xy(n, f, g) &&
                conj(sp.part_10) == sp.part_01 && sp.norm_sq_10 == sp.norm_sq_01))
            ++split_bad;

          // A nonzero constant twist never vanishes on the torus, so the
          // pointwise square |theta^u|^2 + |contraction u|^2 = |theta|^2|u|^2
          // must be strictly positive whenever u is nonzero.
          if (!theta.is_zero() && !u.is_zero()) {
            const Rational lhs =
                norm_sq(wedge(theta, u)) + norm_sq(contract_adjoint(theta, u));
            if (!(lhs == norm_sq(theta) * norm_sq(u)) || !(lhs > 0)) ++pos;
          }
        }
        EXPECT(adj == 0, std::to_string(adj) + " adjointness failures");
        EXPECT(norm == 0, std::to_string(norm) + " pointwise norm-identity failures");
        EXPECT(star == 0, std::to_string(star) + " double-star sign-law failures");
        EXPECT(split_bad == 0, std::to_string(split_bad) + " one-form splitting failures");
        EXPECT(pos == 0, std::to_string(pos) + " positivity failures");
      });

  std::printf("acceptance: %d/10 criteria passed\n", 10 - h.failed);
  return h.failed;
}
