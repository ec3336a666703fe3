#pragma once

// Hermitian geometry of the invariant models: torsion and Lee forms from the
// identity coframe metric, the Gauduchon condition, holomorphic scalar
// curvature, and the (1,0)/(0,1) splitting of real one-forms.

#include <stdexcept>
#include <vector>

#include "thodge/model.hpp"

namespace thodge {

struct DimensionTooSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotPositive : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// omega = sum_k i phi^k ^ phibar^k, the fundamental form of the metric in
// which the coframe is unitary; <omega, omega> = n.
FormQ fundamental_form(int n);

// Metric adjoint of omega ^ (.), exact: <omega ^ u, v> = <u, lefschetz_adjoint(v, omega)>.
FormQ lefschetz_adjoint(const FormQ& a, const FormQ& omega);

struct LeeFormResult {
  FormQ tau;    // (1,0)-torsion form, the omega-trace of the (2,1)-part of d omega
  FormQ theta;  // tau + conj(tau), real
  // Exact norm-square of d omega^{n-1} - (n-1) theta ^ omega^{n-1}; zero
  // whenever theta really is the Lee form of the metric.
  Rational identity_residual{0};
  bool gauduchon = false;  // ddbar omega^{n-1} == 0
  GaussianRational d_star_theta;
  Rational theta_norm_sq{0};
  // 2(n-1) d*theta + (n-1)^2 |theta|^2; collapses to the second term whenever
  // d*theta = 0, which the adjoint matrix makes automatic on these models.
  GaussianRational s_j;
};

// Computes the torsion and Lee forms of (model, omega) and the curvature
// data above.  omega must be the fundamental form of the unitary coframe:
// positivity is checked first (NotPositive), and any other positive (1,1)-form
// is refused because the adjoint machinery encodes the identity metric.
// n = 1 is refused (DimensionTooSmall): the defining identity degenerates.
LeeFormResult lee_form(const LieComplexModel& model, const FormQ& omega);

struct RealOneFormSplit {
  FormQ part_10, part_01;
  Rational norm_sq_10{0}, norm_sq_01{0};
};

// theta = sum_i f_i dx_i + g_i dy_i  splits as
// part_10 = sum (f_i - i g_i)/2 phi^i,  part_01 = sum (f_i + i g_i)/2 phibar^i.
RealOneFormSplit split_real_one_form(int n, const std::vector<Rational>& f,
                                     const std::vector<Rational>& g);

// Constant real 1-forms on a flat model have constant components: validates
// the inputs (flat model, real 1-form, conjugate-symmetric split) and
// reports the (trivially true) parallelism.  Refused on non-flat models,
// where a genuine connection would be needed.
bool parallel_components_check(const LieComplexModel& model, const FormQ& theta_real);

}  // namespace thodge
