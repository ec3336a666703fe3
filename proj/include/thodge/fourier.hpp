#pragma once

// Fourier-truncated forms on the flat torus R^{2n}/Z^{2n} with complex
// coordinates z_j = x_j + i y_j.  A form is a finite sum of terms
// e_k(x) * monomial with e_k = exp(2 pi i k.x), k in Z^{2n} stored as
// (k^x_1..k^x_n, k^y_1..k^y_n).  The e_k are L^2-orthonormal for the unit
// volume and the coframe monomials are orthonormal pointwise, so L^2 adjoints
// are coefficient conjugate-transposes, exactly as in the invariant modules.
// Derivatives act per mode: d/dz_j e_k = zeta_j(k) e_k with
// zeta_j(k) = pi i (k^x_j - i k^y_j), and d/dzbar_j gives zeta_bar.
//
// Operators are sparse and exact in the mode bookkeeping (no truncation):
// applying one never drops terms, so identity residuals measure floating
// rounding only.  Truncation enters in exactly one place, the hard band
// projection of fourier_dirac used by the spectral witness scan.

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "thodge/form.hpp"
#include "thodge/matrix.hpp"
#include "thodge/multi_index.hpp"
#include "thodge/scalar.hpp"

namespace thodge {

using Mode = std::vector<int>;
using FormC = InvariantForm<Complex>;

Mode zero_mode(int n);
Mode mode_add(const Mode& a, const Mode& b);
Mode mode_negate(const Mode& a);
int mode_band(const Mode& a);  // |k|_inf

// Eigenvalue of d/dz_j on e_k (j one-based), and of d/dzbar_j.
Complex zeta(const Mode& k, int j);
Complex zeta_bar(const Mode& k, int j);

// Requested cutoff too small for the bands involved.
struct BandOverflow : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The l1 lower bound on |theta| failed to certify a nowhere-vanishing field.
struct NotNowhereVanishing : std::invalid_argument {
  explicit NotNowhereVanishing(double bound);
  double lower_bound;
};

// ---- forms ------------------------------------------------------------------

class FourierForm {
 public:
  FourierForm() = default;
  explicit FourierForm(int n);

  int n() const { return n_; }
  const std::map<Mode, FormC>& modes() const { return modes_; }
  bool is_zero() const { return modes_.empty(); }
  int band() const;

  void add(const Mode& k, const MultiIndexPQ& m, const Complex& c);
  void add_form(const Mode& k, const FormC& f);
  Complex coeff(const Mode& k, const MultiIndexPQ& m) const;

  // Every term has the given bidegree (vacuously true for the zero form).
  bool homogeneous(int p, int q) const;

  double norm() const;          // L^2, by Parseval
  double max_abs_coeff() const;

  FourierForm& operator+=(const FourierForm& o);
  FourierForm& operator-=(const FourierForm& o);
  FourierForm& operator*=(const Complex& c);
  friend FourierForm operator+(FourierForm a, const FourierForm& b) { return a += b; }
  friend FourierForm operator-(FourierForm a, const FourierForm& b) { return a -= b; }
  friend FourierForm operator*(const Complex& c, FourierForm a) { return a *= c; }
  friend FourierForm operator-(FourierForm a) { return a *= Complex(-1.0, 0.0); }
  friend bool operator==(const FourierForm& a, const FourierForm& b) {
    return a.n_ == b.n_ && a.modes_ == b.modes_;
  }

 private:
  void require_mode(const Mode& k) const;

  int n_ = 1;
  std::map<Mode, FormC> modes_;
};

// Hermitian L^2 product, conjugate-linear in the second argument.
Complex l2_inner(const FourierForm& a, const FourierForm& b);

// Integral over the torus of the scalar component (mean of the function part).
Complex integral(const FourierForm& a);

// Complex conjugate: coefficients conjugate, modes negate, monomial lists swap.
FourierForm conj(const FourierForm& a);

// ---- differential and algebraic operators -----------------------------------

FourierForm dbar(const FourierForm& u);
FourierForm partial_d(const FourierForm& u);
FourierForm exterior_d(const FourierForm& u);
FourierForm codifferential(const FourierForm& u);  // adjoint of exterior_d
FourierForm dbar_adjoint(const FourierForm& u);

// Pointwise wedge by a (possibly non-constant) form: mode convolution.
FourierForm wedge(const FourierForm& eta, const FourierForm& u);
// Adjoint of wedge(eta, .): the contraction by the vector field dual to eta.
FourierForm contract_adjoint(const FourierForm& eta, const FourierForm& u);

// Operators along the vector field eta# dual to a 1-form eta, meaning the
// field with i_{eta#} = (eta ^ .)^*.  For real eta (eta == conj(eta)) the
// field is real and lie_deriv is the honest Lie derivative; for complex eta
// all three extend conjugate-linearly in eta's coefficients, consistently.
FourierForm lie_deriv(const FourierForm& eta, const FourierForm& u);        // d i + i d
FourierForm covariant_deriv(const FourierForm& eta, const FourierForm& u);  // flat nabla_{eta#}
// Derivation action of the endomorphism v -> nabla_v eta# on form slots;
// lie_deriv == covariant_deriv + shape_term holds up to rounding.
FourierForm shape_term(const FourierForm& eta, const FourierForm& u);

// Scalar-valued results (forms with empty monomial): div(eta#) and the
// pointwise squared norms |eta#|^2(x), |u|^2(x).
FourierForm divergence(const FourierForm& eta);
FourierForm field_norm_sq(const FourierForm& eta);
FourierForm pointwise_norm_sq(const FourierForm& u);

// ---- twisting field with certificates ---------------------------------------

// A (0,1)-form used as twisting data.  lower_bound() is the l1 dominance
// bound min_x |theta(x)| >= |mode 0| - sum |other modes| (sufficient, not
// necessary); gradient_bound() is sqrt(2) pi sum_k |k|_2 |coeff_k|, an upper
// bound for sup |nabla theta#| in the unitary frame.
class FourierField {
 public:
  explicit FourierField(FourierForm f);

  const FourierForm& form() const { return form_; }
  int n() const { return form_.n(); }
  int band() const { return form_.band(); }
  double lower_bound() const { return c1_; }
  double gradient_bound() const { return c2_; }
  bool nowhere_vanishing() const { return c1_ > 0.0; }
  FourierField scaled(double t) const;

 private:
  FourierForm form_;
  double c1_ = 0.0;
  double c2_ = 0.0;
};

// ---- spec, basis, assembled operators ----------------------------------------

// Unit lattice Z^{2n}; the mode box |k|_inf <= cutoff is finite and symmetric
// under negation.
struct TorusSpec {
  int n = 1;
  int cutoff = 0;
};

// Basis (mode, monomial) with modes over [-band, band]^{2n} in lexicographic
// order and all (p,q)-monomials at fixed p, q ascending, lexicographic within
// each bidegree.  Global index = mode_rank * monomials.size() + mono_rank.
struct FourierBasis {
  int n = 1, p = 0, band = 0;
  std::vector<Mode> modes;
  std::vector<MultiIndexPQ> monomials;

  int size() const { return static_cast<int>(modes.size() * monomials.size()); }
  int index_of(const Mode& k, const MultiIndexPQ& m) const;  // -1 if outside
  FourierForm element(int index) const;
};

FourierBasis fourier_basis(int n, int p, int band);

// Matrices of dbar, dbar^*, theta^, i_{theta#} over the basis padded to
// cutoff + band(theta).  Columns supported within |k|_inf <= cutoff map
// exactly (no dropped output terms); adjoint pairs are exact conjugate
// transposes.  Throws BandOverflow when cutoff < band(theta).
struct OperatorBlock {
  FourierBasis basis;
  EigenC dbar, dbar_star, theta_wedge, theta_contract;
};

OperatorBlock assemble_operators(const TorusSpec& spec, const FourierField& theta, int p);

// Hard band truncation of dbar + dbar* + t(theta^ + i_{theta#}) from even-q
// to odd-q monomials at fixed p, the finite section used for spectra.  The
// odd-to-even block is the conjugate transpose.
struct DiracTruncation {
  FourierBasis basis;
  std::vector<int> even_index, odd_index;  // global basis indices
  EigenC even_to_odd;
};

DiracTruncation fourier_dirac(const TorusSpec& spec, const FourierField& theta, int p, double t);

// ---- integral identity checks ------------------------------------------------

// All three checks evaluate their expressions through independent operator
// paths with exact mode bookkeeping; residuals are pure floating rounding
// when the inputs satisfy the stated band preconditions.

// Pairing identity for the REAL field V dual to theta + conj(theta):
//   (L_V u, v) == (i_V u, d* v) + (d u, (theta+conj theta) ^ v)
//              == (nabla_V u, v) + (A_V u, v).
// Requires cutoff >= band(u) + band(theta) and same for v.
struct LieIdentityCheck {
  Complex lie_side;
  Complex adjoint_side;
  Complex covariant_side;
  double residual;  // max pairwise difference
};
LieIdentityCheck lie_identity_check(const TorusSpec& spec, const FourierField& theta,
                                    const FourierForm& u, const FourierForm& v);

// Symmetrized divergence identity for the same real field:
//   2 Re (L_V u, u) == 2 Re (A_V u, u) - int div(V) |u|^2.
struct DivergenceIdentityCheck {
  double lhs;
  double rhs;
  double residual;
};
DivergenceIdentityCheck divergence_identity_check(const TorusSpec& spec, const FourierField& theta,
                                                  const FourierForm& u);

// Weighted-norm identity for near-kernel forms of the twisted Dirac operator,
// with the complex contraction i_{theta#} = (theta ^ .)^*:
//   int |theta#|^2 |alpha|^2 == -Re(alpha, (dbar theta) ^ alpha)
//                               - Re(L_{theta#} alpha, alpha).
// Exact for D_theta alpha = 0; for nonzero Dirac residual the defect is
// bounded by sqrt(2) sup|theta| ||D alpha|| ||alpha||, and empirical_ratio
// reports residual / (||D alpha|| ||alpha||).
struct KernelIdentityCheck {
  double weighted_norm;
  double curvature_term;
  double lie_term;
  double residual;
  double dirac_residual;
  double alpha_norm;
  bool precondition_met;  // dirac_residual <= 1e-8 * alpha_norm
  double empirical_ratio;
};
KernelIdentityCheck kernel_identity_check(const TorusSpec& spec, const FourierField& theta,
                                          const FourierForm& alpha);

// Extract a candidate alpha as the inverse-power iterate on the even-side
// Gram operator at parameter t.  When sigma_min exceeds the witness floor the
// truncated kernel is empty and the identity check is vacuous (check empty).
struct KernelProbe {
  double sigma_min;
  bool vacuous;
  FourierForm alpha;
  std::optional<KernelIdentityCheck> check;
};
KernelProbe kernel_probe(const TorusSpec& spec, const FourierField& theta, int p, double t);

// ---- spectral witness scan ----------------------------------------------------

inline constexpr double kWitnessFloor = 1e-6;   // sigma_min above this counts as empty kernel
inline constexpr double kStabilityTol = 1e-3;   // relative cutoff N vs N+2 agreement
inline constexpr double kSigmaRelTol = 1e-10;   // inverse power iteration convergence

// Smallest singular value of a via inverse power iteration on the Gram
// operator, deterministic all-ones start.
double sigma_min_inverse_power(const EigenC& a);

struct ScanPoint {
  double t;
  double sigma_even;  // smallest singular value, even-to-odd, at cutoff
  double sigma_odd;   // odd-to-even (conjugate transpose)
  double sigma_even_refined;  // at cutoff + 2
  double sigma_odd_refined;
  bool stable;  // both parities agree to kStabilityTol between cutoffs
};

struct ScanResult {
  int cutoff = 0;
  int refined_cutoff = 0;
  double c1 = 0.0;  // certified lower bound for inf |theta|
  double c2 = 0.0;  // upper bound for sup |nabla theta#|
  std::vector<ScanPoint> points;
  int witness_index = -1;  // first grid point with both sigmas above the floor

  std::optional<double> witness_t() const {
    if (witness_index < 0) return std::nullopt;
    return points[static_cast<std::size_t>(witness_index)].t;
  }
};

// Scans sigma_min of the truncated twisted Dirac operator over a t grid.
// Requires a nowhere-vanishing certificate (throws NotNowhereVanishing).
// Grid points are independent tasks, fanned out over at most
// scan_thread_cap() threads and joined in grid order.
ScanResult sigma_min_scan(const TorusSpec& spec, const FourierField& theta, int p,
                          const std::vector<double>& t_grid);

// TWISTED_HODGE_THREADS clamped to [1, hardware]; hardware count when unset.
int scan_thread_cap();

}  // namespace thodge
