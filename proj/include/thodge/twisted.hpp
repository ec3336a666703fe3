#pragma once

// Twisted Dolbeault complexes on invariant models: the differential
// dbar + theta^ for a dbar-closed (0,1)-form theta, its Laplacian and Dirac
// operator, cohomology dimensions in exact and numeric modes, and the
// flat-model commutator and primitive-decomposition computations.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thodge/model.hpp"

namespace thodge {

// Construction refusal: the twisted differential only squares to zero when
// dbar theta = 0.  Carries the offending (0,2)-component.
struct NotDbarClosed : std::runtime_error {
  FormQ obstruction;
  explicit NotDbarClosed(FormQ o)
      : std::runtime_error("theta is not dbar-closed; dbar theta = " + thodge::to_string(o)),
        obstruction(std::move(o)) {}
};

// The 0-th twisted cohomology question is only interesting for non-exact
// theta; an exact twist is gauge-equivalent to the untwisted complex.
struct PreconditionExact : std::runtime_error {
  int equivalent_dim;
  explicit PreconditionExact(int dim)
      : std::runtime_error("theta is dbar-exact; twisted cohomology is isomorphic to untwisted"),
        equivalent_dim(dim) {}
};

struct NotClosed : std::runtime_error {
  explicit NotClosed(const FormQ& o) : std::runtime_error("d theta != 0: " + thodge::to_string(o)) {}
};

struct TwistedComplex {
  LieComplexModel model;
  FormQ theta;
  int p = 0;
  // d[q] maps (p,q) to (p,q+1) in bidegree_basis order; d[n] has zero rows.
  std::vector<Matrix<GaussianRational>> d;
  bool dbar_closed_verified = false;
};

struct CohomologyTable {
  int n = 1;
  std::map<std::pair<int, int>, int> dims;
  std::string provenance;  // "exact-rank" or "numeric-kernel"
  std::string theta_label;

  int dim(int p, int q) const {
    auto it = dims.find({p, q});
    return it == dims.end() ? 0 : it->second;
  }
};

// Assembles the twisted differential at fixed holomorphic degree p.  Throws
// NotDbarClosed when dbar theta != 0 and std::invalid_argument when theta is
// not a (0,1)-form.  The composite d[q+1] d[q] = 0 is asserted exactly.
TwistedComplex build_twisted(const LieComplexModel& model, const FormQ& theta, int p);

// Exact dims: h^{p,q} = nullity(d[q]) - rank(d[q-1]) by fraction-free rank.
CohomologyTable cohomology_dims(const TwistedComplex& tc);

// All p at once; label lands in the table for report plumbing.
CohomologyTable twisted_hodge_table(const LieComplexModel& model, const FormQ& theta,
                                    const std::string& theta_label = "");

// Numeric route: kernel of the Laplacian d*d + dd* per bidegree, with the
// spectral-gap verdicts kept alongside the dims.
struct NumericCohomology {
  CohomologyTable table;
  std::map<std::pair<int, int>, KernelCount> verdicts;
  bool all_determinate = true;
};
NumericCohomology twisted_hodge_table_numeric(const LieComplexModel& model, const FormQ& theta,
                                              const std::string& theta_label = "");

// Alternating sum over q at the complex's own p.
int twisted_euler(const TwistedComplex& tc);

// ---- Dirac operator ---------------------------------------------------------

// dbar + dbar* + t theta^ + t i_{theta#} from even q to odd q at fixed p.
// theta need not be dbar-closed here; the index is defined regardless.
struct DiracBlock {
  int n = 1, p = 0;
  GaussianRational t;
  std::vector<int> even_qs, odd_qs;
  Matrix<GaussianRational> even_to_odd;
};

DiracBlock dirac_assemble(const LieComplexModel& model, const FormQ& theta, int p,
                          const GaussianRational& t);
// dim ker - dim coker, exact.
int dirac_index(const DiracBlock& block);
// Exact kernel dimensions on the even and odd sides.
std::pair<int, int> kernel_even_odd(const DiracBlock& block);
// Numeric near-null counts with gap verdicts, from D*D and DD*.
std::pair<KernelCount, KernelCount> kernel_even_odd_numeric(const DiracBlock& block);

// ---- degree-zero and de Rham variants ----------------------------------------

// dim H_theta^{0,0}.  Throws PreconditionExact when theta lies in the image
// of dbar on functions (checked by an honest rank comparison), NotDbarClosed
// as in build_twisted.
int h0_twisted(const LieComplexModel& model, const FormQ& theta);

struct RealMorseNovikov {
  std::vector<int> dims;  // degree k = 0..2n
  int euler = 0;
};
// d + theta^ on the full complex graded by total degree; theta must be a
// real closed 1-form (NotClosed otherwise).
RealMorseNovikov real_morse_novikov(const LieComplexModel& model, const FormQ& theta_real);

// ---- flat-model decompositions ------------------------------------------------

// Max absolute entry over the commutators of the dbar- and partial-Laplacians
// with theta^, thetabar^, and their adjoint contractions.  Exactly zero on
// flat models with constant theta; refuses models with nonzero structure
// constants since the underlying statement needs a parallel form.
double commutator_check(const LieComplexModel& model, const FormQ& theta);

struct PrimitiveDecomposition {
  // s^{a,b} = dim(ker Laplacian ∩ ker i_{theta#} ∩ ker i_{thetabar#}) at the
  // four bidegrees feeding h^{p,q}; out-of-range entries are zero.
  int s_pq = 0, s_pm1_q = 0, s_p_qm1 = 0, s_pm1_qm1 = 0;
  int h_pq = 0;
  bool reconstructed = false;  // h_pq == four-term sum
};
PrimitiveDecomposition primitive_decomposition(const LieComplexModel& model, const FormQ& theta,
                                               int p, int q);

// s^{a,b} alone, for callers replaying the telescoping sums.
int primitive_dim(const LieComplexModel& model, const FormQ& theta, int a, int b);

}  // namespace thodge
