#pragma once

// Invariant-form models of compact complex manifolds: a unitary coframe
// phi^1..phi^n with exact structure constants given by d phi^k.  Tori have
// d = 0; nilmanifold and solvmanifold quotients have nontrivial d.  All
// model data is exact so cohomology on these models is exact linear algebra.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thodge/form.hpp"
#include "thodge/matrix.hpp"

namespace thodge {

using FormQ = InvariantForm<GaussianRational>;

struct LieComplexModel {
  std::string name;
  int n = 1;
  std::vector<FormQ> d_holo;  // d phi^{k+1}
  std::vector<FormQ> d_anti;  // d phibar^{k+1}, always conj(d_holo[k])
  std::map<std::string, FormQ> theta_examples;  // named (0,1)-forms
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
  void fail(std::string msg) {
    ok = false;
    issues.push_back(std::move(msg));
  }
};

// Checks d^2 = 0 on every generator, absence of (0,2)-components in d phi^k
// (integrability of the complex structure), and vanishing of all adjoint
// traces (unimodularity, which the inner product conventions require).
ValidationReport validate(const LieComplexModel& model);

// Trace of ad on the frame vector dual to generator index g (0-based,
// holomorphic first).  All of these vanish on a unimodular algebra.
GaussianRational adjoint_trace(const LieComplexModel& model, int g);

// ---- differential ----------------------------------------------------------

FormQ d_form(const LieComplexModel& model, const FormQ& f);
// Bidegree pieces of d: on a (p,q)-term, dbar keeps the (p,q+1)-part and
// partial the (p+1,q)-part.  Applied termwise to mixed forms.
FormQ dbar_form(const LieComplexModel& model, const FormQ& f);
FormQ partial_form(const LieComplexModel& model, const FormQ& f);

// ---- graded operators -------------------------------------------------------

// A linear operator shifting bidegree by (dp, dq), stored blockwise in the
// bidegree_basis ordering.  block[{p,q}] maps (p,q)-forms to (p+dp, q+dq).
template <class S>
struct GradedOperator {
  int n = 1;
  int dp = 0, dq = 0;
  std::map<std::pair<int, int>, Matrix<S>> blocks;

  const Matrix<S>* block(int p, int q) const {
    auto it = blocks.find({p, q});
    return it == blocks.end() ? nullptr : &it->second;
  }
};

// Expands op(monomial) over target bases.  op must shift bidegree by exactly
// (dp, dq); anything off-bidegree in the output is an error.
template <class OpFn>
GradedOperator<GaussianRational> assemble_graded(int n, int dp, int dq, OpFn&& op) {
  GradedOperator<GaussianRational> out;
  out.n = n;
  out.dp = dp;
  out.dq = dq;
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      int tp = p + dp, tq = q + dq;
      if (tp < 0 || tp > n || tq < 0 || tq > n) continue;
      auto src = bidegree_basis(n, p, q);
      auto dst = bidegree_basis(n, tp, tq);
      Matrix<GaussianRational> m(static_cast<int>(dst.size()), static_cast<int>(src.size()));
      for (size_t j = 0; j < src.size(); ++j) {
        FormQ img = op(monomial_form<GaussianRational>(n, src[j], GaussianRational(1)));
        if (!img.homogeneous(tp, tq)) throw std::logic_error("assemble_graded: operator is not graded as declared");
        for (size_t i = 0; i < dst.size(); ++i) m(static_cast<int>(i), static_cast<int>(j)) = img.coeff(dst[i]);
      }
      out.blocks.emplace(std::make_pair(p, q), std::move(m));
    }
  return out;
}

GradedOperator<GaussianRational> build_dbar(const LieComplexModel& model);
GradedOperator<GaussianRational> build_partial(const LieComplexModel& model);

// ---- construction and serialization -----------------------------------------

LieComplexModel torus_model(int n);
LieComplexModel kodaira_thurston();
LieComplexModel hopf_surface();

// JSON layout: {"name", "n", "mode": "exact"|"numeric", "dphi": {"k":
// [term...]}, "theta_examples": {"label": [{"jbar", "coeff"}...]}} where a
// term is {"bidegree": "(2,0)", "i", "j", "coeff"} with i < j or
// {"bidegree": "(1,1)", "i", "jbar", "coeff"}.  Coefficients use the exact
// a/b+c/di grammar; "numeric" mode additionally admits finite decimals.
// Throws std::runtime_error on malformed input.
LieComplexModel load_model_json(const std::string& text);
LieComplexModel load_model_file(const std::string& path);
// Bundled lookup: "torus_n1".."torus_n3", "kodaira_thurston", "hopf_surface".
// Checks the directory baked in at configure time, then "./models".
std::optional<LieComplexModel> find_bundled_model(const std::string& name);

std::string to_string(const FormQ& f);

}  // namespace thodge
