#include "thodge/curvature.hpp"

namespace thodge {

namespace {

// Determinant by division-based elimination; exact over the Gaussian
// rationals.
GaussianRational determinant(std::vector<std::vector<GaussianRational>> m) {
  const size_t n = m.size();
  GaussianRational det = scalar_field<GaussianRational>::one();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col].is_zero()) ++piv;
    if (piv == n) return {};
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      GaussianRational f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return det;
}

// Positivity of a real (1,1)-form via its coefficient matrix: omega =
// sum i h_jk phi^j ^ phibar^k with H Hermitian; Sylvester's criterion on the
// exact leading minors.
void require_positive(const FormQ& omega) {
  const int n = omega.n();
  if (!omega.homogeneous(1, 1)) throw NotPositive("omega must be a (1,1)-form");
  if (!(conj(omega) == omega)) throw NotPositive("omega must be real");
  std::vector<std::vector<GaussianRational>> h(static_cast<size_t>(n),
                                               std::vector<GaussianRational>(static_cast<size_t>(n)));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      h[static_cast<size_t>(j)][static_cast<size_t>(k)] =
          omega.coeff({1u << j, 1u << k}) * (-GaussianRational::i());
  for (int lead = 1; lead <= n; ++lead) {
    std::vector<std::vector<GaussianRational>> minor(static_cast<size_t>(lead));
    for (int r = 0; r < lead; ++r)
      minor[static_cast<size_t>(r)] =
          std::vector<GaussianRational>(h[static_cast<size_t>(r)].begin(),
                                        h[static_cast<size_t>(r)].begin() + lead);
    GaussianRational det = determinant(std::move(minor));
    if (!det.is_real() || det.re <= 0) throw NotPositive("omega is not positive definite");
  }
}

FormQ wedge_power(const FormQ& f, int k) {
  FormQ out(f.n());
  out.add_term({0, 0}, scalar_field<GaussianRational>::one());
  for (int i = 0; i < k; ++i) out = wedge(out, f);
  return out;
}

}  // namespace

FormQ fundamental_form(int n) {
  FormQ omega(n);
  for (int k = 0; k < n; ++k) omega.add_term({1u << k, 1u << k}, GaussianRational::i());
  return omega;
}

FormQ lefschetz_adjoint(const FormQ& a, const FormQ& omega) { return contract_adjoint(omega, a); }

LeeFormResult lee_form(const LieComplexModel& model, const FormQ& omega) {
  const int n = model.n;
  if (n < 2) throw DimensionTooSmall("lee_form: the defining identity carries an (n-1) factor; need n >= 2");
  if (omega.n() != n) throw std::invalid_argument("lee_form: omega dimension mismatch");
  require_positive(omega);
  if (!(omega == fundamental_form(n)))
    throw std::invalid_argument("lee_form: only the unitary-coframe fundamental form is supported");

  LeeFormResult out;
  out.tau = lefschetz_adjoint(partial_form(model, omega), omega);
  out.theta = out.tau + conj(out.tau);

  FormQ omega_pow = wedge_power(omega, n - 1);
  FormQ lhs = d_form(model, omega_pow);
  FormQ rhs = scalar_field<GaussianRational>::from_int(n - 1) * wedge(out.theta, omega_pow);
  out.identity_residual = norm_sq(lhs - rhs);

  out.gauduchon = partial_form(model, dbar_form(model, omega_pow)).is_zero();

  // d* on 1-forms is the conjugate transpose of d on functions; d of the
  // constant function vanishes, so this is an exact zero, computed not assumed.
  {
    auto one = monomial_form<GaussianRational>(n, {0, 0}, scalar_field<GaussianRational>::one());
    FormQ d_one = d_form(model, one);
    GaussianRational acc;
    for (const auto& [m, c] : d_one.terms()) acc += scalar_field<GaussianRational>::conj(c) * out.theta.coeff(m);
    out.d_star_theta = acc;
  }

  out.theta_norm_sq = norm_sq(out.theta);
  GaussianRational nm1 = scalar_field<GaussianRational>::from_int(n - 1);
  out.s_j = GaussianRational(2) * nm1 * out.d_star_theta + nm1 * nm1 * GaussianRational(out.theta_norm_sq);

  // Nowhere-vanishing conclusion for positive curvature under Gauduchon:
  // constant forms are nowhere vanishing iff nonzero.
  if (out.gauduchon && out.s_j.is_real() && out.s_j.re > 0 && out.theta_norm_sq == 0)
    throw std::logic_error("lee_form: positive curvature with vanishing Lee form");
  return out;
}

RealOneFormSplit split_real_one_form(int n, const std::vector<Rational>& f,
                                     const std::vector<Rational>& g) {
  if (static_cast<int>(f.size()) != n || static_cast<int>(g.size()) != n)
    throw std::invalid_argument("split_real_one_form: need n dx and n dy coefficients");
  RealOneFormSplit out;
  out.part_10 = FormQ(n);
  out.part_01 = FormQ(n);
  for (int j = 0; j < n; ++j) {
    const auto& fj = f[static_cast<size_t>(j)];
    const auto& gj = g[static_cast<size_t>(j)];
    out.part_10.add_term({1u << j, 0}, GaussianRational(fj / 2, -gj / 2));
    out.part_01.add_term({0, 1u << j}, GaussianRational(fj / 2, gj / 2));
  }
  out.norm_sq_10 = norm_sq(out.part_10);
  out.norm_sq_01 = norm_sq(out.part_01);
  return out;
}

bool parallel_components_check(const LieComplexModel& model, const FormQ& theta_real) {
  for (const auto& f : model.d_holo)
    if (!f.is_zero())
      throw std::invalid_argument("parallel_components_check: model must be flat");
  if (theta_real.n() != model.n) throw std::invalid_argument("theta: dimension mismatch with model");
  FormQ part_10(model.n), part_01(model.n);
  for (const auto& [m, c] : theta_real.terms()) {
    if (m.p() + m.q() != 1) throw std::invalid_argument("parallel_components_check: need a 1-form");
    if (m.p() == 1)
      part_10.add_term(m, c);
    else
      part_01.add_term(m, c);
  }
  if (!(conj(theta_real) == theta_real))
    throw std::invalid_argument("parallel_components_check: theta must be real");
  // Realness makes the components conjugate; constant coefficients have
  // nothing left to vary, which is the whole content here.
  return conj(part_10) == part_01;
}

}  // namespace thodge
