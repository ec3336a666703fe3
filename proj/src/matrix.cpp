#include "thodge/matrix.hpp"

#include <cmath>
#include <limits>

namespace thodge {

int numeric_rank(const EigenC& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<EigenC> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = rel_tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

KernelCount hermitian_kernel_count(const EigenC& m, double rel_drop, double gap_ratio) {
  KernelCount out;
  if (m.rows() == 0) {
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<EigenC> es(m, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  const int sz = static_cast<int>(ev.size());
  double evmax = std::abs(ev(sz - 1));
  for (int i = 0; i < sz; ++i) evmax = std::max(evmax, std::abs(ev(i)));
  if (evmax == 0.0) {
    // The zero operator: the whole space is kernel, no ambiguity.
    out.dim = sz;
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  const double cutoff = rel_drop * evmax;
  int dim = 0;
  while (dim < sz && std::abs(ev(dim)) < cutoff) ++dim;
  out.dim = dim;
  if (dim == 0 || dim == sz) {
    out.gap = std::numeric_limits<double>::infinity();
    return out;
  }
  const double dropped = std::abs(ev(dim - 1));
  const double kept = std::abs(ev(dim));
  out.gap = dropped == 0.0 ? std::numeric_limits<double>::infinity() : kept / dropped;
  out.determinate = out.gap >= gap_ratio;
  return out;
}

}  // namespace thodge
