#include "thodge/twisted.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace thodge {

namespace {

using MatQ = Matrix<GaussianRational>;

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(r);
}

int bdim(int n, int p, int q) {
  if (p < 0 || q < 0 || p > n || q > n) return 0;
  return binom(n, p) * binom(n, q);
}

// Matrix of op restricted to bidegree (p,q), mapping into (tp,tq); empty
// bidegrees give empty dimensions so rank/nullity stay uniform at the edges.
template <class OpFn>
MatQ assemble_block(int n, int p, int q, int tp, int tq, OpFn&& op) {
  std::vector<MultiIndexPQ> src, dst;
  if (bdim(n, p, q) > 0) src = bidegree_basis(n, p, q);
  if (bdim(n, tp, tq) > 0) dst = bidegree_basis(n, tp, tq);
  MatQ m(static_cast<int>(dst.size()), static_cast<int>(src.size()));
  for (size_t j = 0; j < src.size(); ++j) {
    FormQ img = op(monomial_form<GaussianRational>(n, src[j], scalar_field<GaussianRational>::one()));
    if (!img.homogeneous(tp, tq)) throw std::logic_error("assemble_block: off-bidegree image");
    for (size_t i = 0; i < dst.size(); ++i)
      m(static_cast<int>(i), static_cast<int>(j)) = img.coeff(dst[i]);
  }
  return m;
}

MatQ vstack(const std::vector<MatQ>& parts) {
  int cols = 0, rows = 0;
  for (const auto& m : parts) {
    cols = std::max(cols, m.cols());
    rows += m.rows();
  }
  MatQ out(rows, cols);
  int at = 0;
  for (const auto& m : parts) {
    if (m.rows() > 0 && m.cols() != cols) throw std::invalid_argument("vstack: column mismatch");
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) out(at + i, j) = m(i, j);
    at += m.rows();
  }
  return out;
}

void require_theta_01(const LieComplexModel& model, const FormQ& theta) {
  if (theta.n() != model.n) throw std::invalid_argument("theta: dimension mismatch with model");
  if (!theta.homogeneous(0, 1)) throw std::invalid_argument("theta must be a (0,1)-form");
}

bool is_flat(const LieComplexModel& model) {
  for (const auto& f : model.d_holo)
    if (!f.is_zero()) return false;
  return true;
}

double max_abs_entry(const MatQ& m) {
  double mx = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      mx = std::max(mx, std::abs(scalar_field<GaussianRational>::to_complex(m(i, j))));
  return mx;
}

// Laplacian block of a graded first-order operator D at (p,q):
// D(p,q)* D(p,q) + D(p-dp,q-dq) D(p-dp,q-dq)*.
MatQ laplacian_block(const GradedOperator<GaussianRational>& D, int n, int p, int q) {
  const int d = bdim(n, p, q);
  MatQ lap(d, d);
  if (const MatQ* up = D.block(p, q)) lap = lap + up->conj_transpose() * (*up);
  if (const MatQ* down = D.block(p - D.dp, q - D.dq)) lap = lap + (*down) * down->conj_transpose();
  return lap;
}

}  // namespace

TwistedComplex build_twisted(const LieComplexModel& model, const FormQ& theta, int p) {
  require_theta_01(model, theta);
  const int n = model.n;
  if (p < 0 || p > n) throw std::invalid_argument("build_twisted: p out of range");
  FormQ obstruction = dbar_form(model, theta);
  if (!obstruction.is_zero()) throw NotDbarClosed(obstruction);

  TwistedComplex tc;
  tc.model = model;
  tc.theta = theta;
  tc.p = p;
  tc.dbar_closed_verified = true;
  auto op = [&](const FormQ& f) { return dbar_form(model, f) + wedge(theta, f); };
  for (int q = 0; q <= n; ++q) tc.d.push_back(assemble_block(n, p, q, p, q + 1, op));
  for (int q = 0; q + 1 <= n; ++q)
    if (!(tc.d[q + 1] * tc.d[q]).is_zero()) throw std::logic_error("build_twisted: composite differential nonzero");
  return tc;
}

CohomologyTable cohomology_dims(const TwistedComplex& tc) {
  CohomologyTable table;
  table.n = tc.model.n;
  table.provenance = "exact-rank";
  for (int q = 0; q <= tc.model.n; ++q) {
    int dim = nullity(tc.d[q]) - (q > 0 ? bareiss_rank(tc.d[q - 1]) : 0);
    if (dim < 0 || dim > bdim(tc.model.n, tc.p, q)) throw std::logic_error("cohomology_dims: dimension out of range");
    table.dims[{tc.p, q}] = dim;
  }
  return table;
}

CohomologyTable twisted_hodge_table(const LieComplexModel& model, const FormQ& theta,
                                    const std::string& theta_label) {
  CohomologyTable table;
  table.n = model.n;
  table.provenance = "exact-rank";
  table.theta_label = theta_label;
  for (int p = 0; p <= model.n; ++p) {
    auto part = cohomology_dims(build_twisted(model, theta, p));
    table.dims.insert(part.dims.begin(), part.dims.end());
  }
  return table;
}

NumericCohomology twisted_hodge_table_numeric(const LieComplexModel& model, const FormQ& theta,
                                              const std::string& theta_label) {
  NumericCohomology out;
  out.table.n = model.n;
  out.table.provenance = "numeric-kernel";
  out.table.theta_label = theta_label;
  for (int p = 0; p <= model.n; ++p) {
    TwistedComplex tc = build_twisted(model, theta, p);
    for (int q = 0; q <= model.n; ++q) {
      MatQ lap = tc.d[q].conj_transpose() * tc.d[q];
      if (q > 0) lap = lap + tc.d[q - 1] * tc.d[q - 1].conj_transpose();
      KernelCount kc = hermitian_kernel_count(to_eigen(lap));
      out.table.dims[{p, q}] = kc.dim;
      out.verdicts[{p, q}] = kc;
      out.all_determinate = out.all_determinate && kc.determinate;
    }
  }
  return out;
}

int twisted_euler(const TwistedComplex& tc) {
  CohomologyTable table = cohomology_dims(tc);
  int acc = 0;
  for (int q = 0; q <= tc.model.n; ++q) acc += (q % 2 == 0 ? 1 : -1) * table.dim(tc.p, q);
  return acc;
}

DiracBlock dirac_assemble(const LieComplexModel& model, const FormQ& theta, int p,
                          const GaussianRational& t) {
  require_theta_01(model, theta);
  const int n = model.n;
  if (p < 0 || p > n) throw std::invalid_argument("dirac_assemble: p out of range");
  if (!t.is_real()) throw std::invalid_argument("dirac_assemble: scale t must be real");

  DiracBlock block;
  block.n = n;
  block.p = p;
  block.t = t;
  std::vector<int> even_off{0}, odd_off{0};
  for (int q = 0; q <= n; ++q) {
    if (q % 2 == 0) {
      block.even_qs.push_back(q);
      even_off.push_back(even_off.back() + bdim(n, p, q));
    } else {
      block.odd_qs.push_back(q);
      odd_off.push_back(odd_off.back() + bdim(n, p, q));
    }
  }
  MatQ D(odd_off.back(), even_off.back());

  // M_q = (dbar + t theta^) restricted to (p,q); its conjugate transpose is
  // the (dbar* + t i_{theta#}) component landing one q lower.
  auto op = [&](const FormQ& f) { return dbar_form(model, f) + t * wedge(theta, f); };
  std::vector<MatQ> M;
  for (int q = 0; q < n; ++q) M.push_back(assemble_block(n, p, q, p, q + 1, op));

  auto odd_slot = [&](int q) { return q / 2; };  // q odd -> index in odd_qs
  for (size_t e = 0; e < block.even_qs.size(); ++e) {
    const int q = block.even_qs[e];
    const int col0 = even_off[e];
    if (q + 1 <= n) {
      const MatQ& up = M[q];
      const int row0 = odd_off[odd_slot(q + 1)];
      for (int i = 0; i < up.rows(); ++i)
        for (int j = 0; j < up.cols(); ++j) D(row0 + i, col0 + j) = up(i, j);
    }
    if (q - 1 >= 0) {
      MatQ down = M[q - 1].conj_transpose();
      const int row0 = odd_off[odd_slot(q - 1)];
      for (int i = 0; i < down.rows(); ++i)
        for (int j = 0; j < down.cols(); ++j) D(row0 + i, col0 + j) += down(i, j);
    }
  }
  block.even_to_odd = std::move(D);
  return block;
}

int dirac_index(const DiracBlock& block) {
  return nullity(block.even_to_odd) - nullity(block.even_to_odd.conj_transpose());
}

std::pair<int, int> kernel_even_odd(const DiracBlock& block) {
  return {nullity(block.even_to_odd), nullity(block.even_to_odd.conj_transpose())};
}

std::pair<KernelCount, KernelCount> kernel_even_odd_numeric(const DiracBlock& block) {
  EigenC D = to_eigen(block.even_to_odd);
  EigenC dd = D.adjoint() * D;
  EigenC cc = D * D.adjoint();
  return {hermitian_kernel_count(dd), hermitian_kernel_count(cc)};
}

int h0_twisted(const LieComplexModel& model, const FormQ& theta) {
  require_theta_01(model, theta);
  FormQ obstruction = dbar_form(model, theta);
  if (!obstruction.is_zero()) throw NotDbarClosed(obstruction);

  // Exactness test on functions: theta in im(dbar: (0,0) -> (0,1))?
  const int n = model.n;
  MatQ A = assemble_block(n, 0, 0, 0, 1, [&](const FormQ& f) { return dbar_form(model, f); });
  auto basis01 = bidegree_basis(n, 0, 1);
  MatQ aug(A.rows(), A.cols() + 1);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < A.cols(); ++j) aug(i, j) = A(i, j);
    aug(i, A.cols()) = theta.coeff(basis01[static_cast<size_t>(i)]);
  }
  if (bareiss_rank(aug) == bareiss_rank(A)) throw PreconditionExact(1);

  TwistedComplex tc = build_twisted(model, theta, 0);
  return nullity(tc.d[0]);
}

RealMorseNovikov real_morse_novikov(const LieComplexModel& model, const FormQ& theta_real) {
  if (theta_real.n() != model.n) throw std::invalid_argument("theta: dimension mismatch with model");
  for (const auto& [m, c] : theta_real.terms()) {
    (void)c;
    if (m.p() + m.q() != 1) throw std::invalid_argument("real_morse_novikov: theta must be a 1-form");
  }
  if (!(conj(theta_real) == theta_real)) throw std::invalid_argument("real_morse_novikov: theta must be real");
  FormQ dtheta = d_form(model, theta_real);
  if (!dtheta.is_zero()) throw NotClosed(dtheta);

  const int n = model.n;
  // Degree-k basis: bidegrees (p, k-p) with p ascending, each in basis order.
  auto degree_basis = [&](int k) {
    std::vector<MultiIndexPQ> basis;
    for (int p = std::max(0, k - n); p <= std::min(n, k); ++p) {
      auto part = bidegree_basis(n, p, k - p);
      basis.insert(basis.end(), part.begin(), part.end());
    }
    return basis;
  };

  std::vector<MatQ> M;
  for (int k = 0; k <= 2 * n; ++k) {
    auto src = degree_basis(k);
    auto dst = k + 1 <= 2 * n ? degree_basis(k + 1) : std::vector<MultiIndexPQ>{};
    std::map<MultiIndexPQ, int, MultiIndexLess> index;
    for (size_t i = 0; i < dst.size(); ++i) index[dst[i]] = static_cast<int>(i);
    MatQ m(static_cast<int>(dst.size()), static_cast<int>(src.size()));
    for (size_t j = 0; j < src.size(); ++j) {
      FormQ f = monomial_form<GaussianRational>(n, src[j], scalar_field<GaussianRational>::one());
      FormQ img = d_form(model, f) + wedge(theta_real, f);
      for (const auto& [mm, cc] : img.terms()) {
        auto it = index.find(mm);
        if (it == index.end()) throw std::logic_error("real_morse_novikov: image off degree");
        m(it->second, static_cast<int>(j)) = cc;
      }
    }
    M.push_back(std::move(m));
  }

  RealMorseNovikov out;
  for (int k = 0; k <= 2 * n; ++k) {
    int dim = nullity(M[k]) - (k > 0 ? bareiss_rank(M[k - 1]) : 0);
    out.dims.push_back(dim);
    out.euler += (k % 2 == 0 ? 1 : -1) * dim;
  }
  return out;
}

double commutator_check(const LieComplexModel& model, const FormQ& theta) {
  require_theta_01(model, theta);
  if (!is_flat(model))
    throw std::invalid_argument("commutator_check: model must be flat (all structure constants zero)");
  const int n = model.n;
  const FormQ theta_bar = conj(theta);

  auto dbar = build_dbar(model);
  auto partial = build_partial(model);
  auto wedge_theta = assemble_graded(n, 0, 1, [&](const FormQ& f) { return wedge(theta, f); });
  auto wedge_theta_bar = assemble_graded(n, 1, 0, [&](const FormQ& f) { return wedge(theta_bar, f); });
  auto contract_theta = assemble_graded(n, 0, -1, [&](const FormQ& f) { return contract_adjoint(theta, f); });
  auto contract_theta_bar =
      assemble_graded(n, -1, 0, [&](const FormQ& f) { return contract_adjoint(theta_bar, f); });

  double worst = 0.0;
  for (const auto* lap_src : {&dbar, &partial})
    for (const auto* X : {&wedge_theta, &wedge_theta_bar, &contract_theta, &contract_theta_bar})
      for (int p = 0; p <= n; ++p)
        for (int q = 0; q <= n; ++q) {
          const MatQ* xb = X->block(p, q);
          if (xb == nullptr || xb->rows() == 0 || xb->cols() == 0) continue;
          MatQ comm = laplacian_block(*lap_src, n, p + X->dp, q + X->dq) * (*xb) -
                      (*xb) * laplacian_block(*lap_src, n, p, q);
          worst = std::max(worst, max_abs_entry(comm));
        }
  return worst;
}

int primitive_dim(const LieComplexModel& model, const FormQ& theta, int a, int b) {
  const int n = model.n;
  if (bdim(n, a, b) == 0) return 0;
  auto dbar = build_dbar(model);
  MatQ lap = laplacian_block(dbar, n, a, b);
  MatQ ca = assemble_block(n, a, b, a, b - 1, [&](const FormQ& f) { return contract_adjoint(theta, f); });
  MatQ cb = assemble_block(n, a, b, a - 1, b,
                           [&](const FormQ& f) { return contract_adjoint(conj(theta), f); });
  return nullity(vstack({lap, ca, cb}));
}

PrimitiveDecomposition primitive_decomposition(const LieComplexModel& model, const FormQ& theta,
                                               int p, int q) {
  require_theta_01(model, theta);
  if (!is_flat(model))
    throw std::invalid_argument("primitive_decomposition: model must be flat (all structure constants zero)");
  if (theta.is_zero()) throw std::invalid_argument("primitive_decomposition: theta must be nonzero");
  const int n = model.n;
  if (p < 0 || p > n || q < 0 || q > n) throw std::invalid_argument("primitive_decomposition: bidegree out of range");

  PrimitiveDecomposition out;
  out.s_pq = primitive_dim(model, theta, p, q);
  out.s_pm1_q = primitive_dim(model, theta, p - 1, q);
  out.s_p_qm1 = primitive_dim(model, theta, p, q - 1);
  out.s_pm1_qm1 = primitive_dim(model, theta, p - 1, q - 1);
  FormQ zero_theta(n);
  out.h_pq = cohomology_dims(build_twisted(model, zero_theta, p)).dim(p, q);
  out.reconstructed = out.h_pq == out.s_pq + out.s_pm1_q + out.s_p_qm1 + out.s_pm1_qm1;
  return out;
}

}  // namespace thodge
