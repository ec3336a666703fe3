#include "thodge/fourier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include <Eigen/Cholesky>

namespace thodge {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

void require_dimension(int n) {
  if (n < 1 || n > kMaxGenerators) throw std::invalid_argument("FourierForm: bad dimension");
}

void require_spec(const TorusSpec& spec) {
  require_dimension(spec.n);
  if (spec.cutoff < 0) throw std::invalid_argument("TorusSpec: negative cutoff");
}

void require_degree_p(const TorusSpec& spec, int p) {
  if (p < 0 || p > spec.n) throw std::invalid_argument("holomorphic degree out of range");
}

void require_same_n(int n, const FourierForm& u, const char* what) {
  if (u.n() != n) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

Mode mode_sub(const Mode& a, const Mode& b) { return mode_add(a, mode_negate(b)); }

// Scalar trig polynomials as mode -> coefficient maps.
using ScalarModes = std::map<Mode, Complex>;

void scalar_add(ScalarModes& m, const Mode& k, const Complex& c) {
  if (c == Complex{}) return;
  auto [it, inserted] = m.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) m.erase(it);
  }
}

// Components of the field dual to a 1-form: eta# = sum_j holo[j] V_j + anti[j] Vbar_j,
// fixed by i_{eta#} = (eta ^ .)^*: a coefficient b on phi^j (phibar^j) at mode k
// contributes conj(b) e_{-k} to holo[j] (anti[j]).
struct FieldComponents {
  std::vector<ScalarModes> holo, anti;
};

FieldComponents sharp_components(const FourierForm& eta) {
  const int n = eta.n();
  FieldComponents fc{std::vector<ScalarModes>(static_cast<std::size_t>(n)),
                     std::vector<ScalarModes>(static_cast<std::size_t>(n))};
  for (const auto& [k, f] : eta.modes()) {
    const Mode nk = mode_negate(k);
    for (const auto& [m, c] : f.terms()) {
      if (m.degree() != 1) throw std::invalid_argument("field dual: eta must be a 1-form");
      if (m.holo)
        scalar_add(fc.holo[static_cast<std::size_t>(std::countr_zero(m.holo))], nk, std::conj(c));
      else
        scalar_add(fc.anti[static_cast<std::size_t>(std::countr_zero(m.anti))], nk, std::conj(c));
    }
  }
  return fc;
}

// out += |g(x)|^2 as a trig polynomial (mode convolution with the conjugate).
void accumulate_abs_sq(FourierForm& out, const ScalarModes& g) {
  for (const auto& [k1, c1] : g)
    for (const auto& [k2, c2] : g) out.add(mode_sub(k1, k2), MultiIndexPQ{0, 0}, c1 * std::conj(c2));
}

std::vector<FormC> holo_coframe(int n) {
  std::vector<FormC> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) v.push_back(generator_form<Complex>(n, j));
  return v;
}

std::vector<FormC> anti_coframe(int n) {
  std::vector<FormC> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) v.push_back(conj_generator_form<Complex>(n, j));
  return v;
}

}  // namespace

Mode zero_mode(int n) {
  require_dimension(n);
  return Mode(static_cast<std::size_t>(2 * n), 0);
}

Mode mode_add(const Mode& a, const Mode& b) {
  if (a.size() != b.size()) throw std::invalid_argument("mode_add: size mismatch");
  Mode out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Mode mode_negate(const Mode& a) {
  Mode out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

int mode_band(const Mode& a) {
  int b = 0;
  for (int v : a) b = std::max(b, std::abs(v));
  return b;
}

Complex zeta(const Mode& k, int j) {
  const int n = static_cast<int>(k.size()) / 2;
  if (static_cast<int>(k.size()) != 2 * n || n < 1 || j < 1 || j > n)
    throw std::invalid_argument("zeta: bad index");
  return {kPi * k[static_cast<std::size_t>(n + j - 1)], kPi * k[static_cast<std::size_t>(j - 1)]};
}

Complex zeta_bar(const Mode& k, int j) {
  const int n = static_cast<int>(k.size()) / 2;
  if (static_cast<int>(k.size()) != 2 * n || n < 1 || j < 1 || j > n)
    throw std::invalid_argument("zeta_bar: bad index");
  return {-kPi * k[static_cast<std::size_t>(n + j - 1)], kPi * k[static_cast<std::size_t>(j - 1)]};
}

NotNowhereVanishing::NotNowhereVanishing(double bound)
    : std::invalid_argument("twisting field is not certified nowhere-vanishing: l1 lower bound " +
                            std::to_string(bound) + " is not positive"),
      lower_bound(bound) {}

// ---- FourierForm -------------------------------------------------------------

FourierForm::FourierForm(int n) : n_(n) { require_dimension(n); }

void FourierForm::require_mode(const Mode& k) const {
  if (static_cast<int>(k.size()) != 2 * n_) throw std::invalid_argument("FourierForm: mode size mismatch");
}

int FourierForm::band() const {
  int b = 0;
  for (const auto& [k, f] : modes_) b = std::max(b, mode_band(k));
  return b;
}

void FourierForm::add(const Mode& k, const MultiIndexPQ& m, const Complex& c) {
  require_mode(k);
  if (scalar_field<Complex>::is_zero(c)) return;
  auto it = modes_.find(k);
  if (it == modes_.end()) it = modes_.emplace(k, FormC(n_)).first;
  it->second.add_term(m, c);
  if (it->second.is_zero()) modes_.erase(it);
}

void FourierForm::add_form(const Mode& k, const FormC& f) {
  require_mode(k);
  if (f.n() != n_) throw std::invalid_argument("FourierForm: dimension mismatch");
  if (f.is_zero()) return;
  auto it = modes_.find(k);
  if (it == modes_.end()) {
    modes_.emplace(k, f);
    return;
  }
  it->second += f;
  if (it->second.is_zero()) modes_.erase(it);
}

Complex FourierForm::coeff(const Mode& k, const MultiIndexPQ& m) const {
  require_mode(k);
  auto it = modes_.find(k);
  return it == modes_.end() ? Complex{} : it->second.coeff(m);
}

bool FourierForm::homogeneous(int p, int q) const {
  for (const auto& [k, f] : modes_)
    if (!f.homogeneous(p, q)) return false;
  return true;
}

double FourierForm::norm() const {
  double acc = 0.0;
  for (const auto& [k, f] : modes_) acc += norm_sq(f);
  return std::sqrt(acc);
}

double FourierForm::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, f] : modes_)
    for (const auto& [mi, c] : f.terms()) m = std::max(m, std::abs(c));
  return m;
}

FourierForm& FourierForm::operator+=(const FourierForm& o) {
  if (n_ != o.n_) throw std::invalid_argument("FourierForm: dimension mismatch");
  for (const auto& [k, f] : o.modes_) add_form(k, f);
  return *this;
}

FourierForm& FourierForm::operator-=(const FourierForm& o) {
  if (n_ != o.n_) throw std::invalid_argument("FourierForm: dimension mismatch");
  for (const auto& [k, f] : o.modes_) add_form(k, -f);
  return *this;
}

FourierForm& FourierForm::operator*=(const Complex& c) {
  if (scalar_field<Complex>::is_zero(c)) {
    modes_.clear();
    return *this;
  }
  for (auto it = modes_.begin(); it != modes_.end();) {
    it->second *= c;
    it = it->second.is_zero() ? modes_.erase(it) : std::next(it);
  }
  return *this;
}

Complex l2_inner(const FourierForm& a, const FourierForm& b) {
  if (a.n() != b.n()) throw std::invalid_argument("l2_inner: dimension mismatch");
  const bool a_small = a.modes().size() <= b.modes().size();
  const FourierForm& small = a_small ? a : b;
  const FourierForm& large = a_small ? b : a;
  Complex acc{};
  for (const auto& [k, f] : small.modes()) {
    auto it = large.modes().find(k);
    if (it == large.modes().end()) continue;
    acc += a_small ? inner(f, it->second) : inner(it->second, f);
  }
  return acc;
}

Complex integral(const FourierForm& a) { return a.coeff(zero_mode(a.n()), MultiIndexPQ{0, 0}); }

FourierForm conj(const FourierForm& a) {
  FourierForm out(a.n());
  for (const auto& [k, f] : a.modes()) out.add_form(mode_negate(k), conj(f));
  return out;
}

// ---- differential operators ---------------------------------------------------

FourierForm dbar(const FourierForm& u) {
  const int n = u.n();
  const auto phib = anti_coframe(n);
  FourierForm out(n);
  for (const auto& [k, f] : u.modes())
    for (int j = 1; j <= n; ++j) {
      const Complex z = zeta_bar(k, j);
      if (z == Complex{}) continue;
      FormC w = wedge(phib[static_cast<std::size_t>(j - 1)], f);
      w *= z;
      out.add_form(k, w);
    }
  return out;
}

FourierForm partial_d(const FourierForm& u) {
  const int n = u.n();
  const auto phi = holo_coframe(n);
  FourierForm out(n);
  for (const auto& [k, f] : u.modes())
    for (int j = 1; j <= n; ++j) {
      const Complex z = zeta(k, j);
      if (z == Complex{}) continue;
      FormC w = wedge(phi[static_cast<std::size_t>(j - 1)], f);
      w *= z;
      out.add_form(k, w);
    }
  return out;
}

FourierForm exterior_d(const FourierForm& u) { return partial_d(u) + dbar(u); }

FourierForm codifferential(const FourierForm& u) {
  const int n = u.n();
  const auto phi = holo_coframe(n);
  const auto phib = anti_coframe(n);
  FourierForm out(n);
  for (const auto& [k, f] : u.modes())
    for (int j = 1; j <= n; ++j) {
      const Complex zh = std::conj(zeta(k, j));
      const Complex za = std::conj(zeta_bar(k, j));
      if (zh != Complex{}) {
        FormC g = contract_adjoint(phi[static_cast<std::size_t>(j - 1)], f);
        g *= zh;
        out.add_form(k, g);
      }
      if (za != Complex{}) {
        FormC g = contract_adjoint(phib[static_cast<std::size_t>(j - 1)], f);
        g *= za;
        out.add_form(k, g);
      }
    }
  return out;
}

FourierForm dbar_adjoint(const FourierForm& u) {
  const int n = u.n();
  const auto phib = anti_coframe(n);
  FourierForm out(n);
  for (const auto& [k, f] : u.modes())
    for (int j = 1; j <= n; ++j) {
      const Complex za = std::conj(zeta_bar(k, j));
      if (za == Complex{}) continue;
      FormC g = contract_adjoint(phib[static_cast<std::size_t>(j - 1)], f);
      g *= za;
      out.add_form(k, g);
    }
  return out;
}

FourierForm wedge(const FourierForm& eta, const FourierForm& u) {
  if (eta.n() != u.n()) throw std::invalid_argument("wedge: dimension mismatch");
  FourierForm out(u.n());
  for (const auto& [ke, fe] : eta.modes())
    for (const auto& [ku, fu] : u.modes()) {
      FormC w = wedge(fe, fu);
      if (!w.is_zero()) out.add_form(mode_add(ke, ku), w);
    }
  return out;
}

FourierForm contract_adjoint(const FourierForm& eta, const FourierForm& u) {
  if (eta.n() != u.n()) throw std::invalid_argument("contract_adjoint: dimension mismatch");
  FourierForm out(u.n());
  for (const auto& [ke, fe] : eta.modes())
    for (const auto& [ku, fu] : u.modes()) {
      FormC g = contract_adjoint(fe, fu);
      if (!g.is_zero()) out.add_form(mode_sub(ku, ke), g);
    }
  return out;
}

FourierForm lie_deriv(const FourierForm& eta, const FourierForm& u) {
  return exterior_d(contract_adjoint(eta, u)) + contract_adjoint(eta, exterior_d(u));
}

FourierForm covariant_deriv(const FourierForm& eta, const FourierForm& u) {
  if (eta.n() != u.n()) throw std::invalid_argument("covariant_deriv: dimension mismatch");
  const int n = u.n();
  const FieldComponents fc = sharp_components(eta);
  FourierForm out(n);
  for (const auto& [k, f] : u.modes())
    for (int j = 1; j <= n; ++j) {
      const Complex zh = zeta(k, j);
      const Complex za = zeta_bar(k, j);
      if (zh != Complex{})
        for (const auto& [kc, cc] : fc.holo[static_cast<std::size_t>(j - 1)]) {
          FormC g = f;
          g *= cc * zh;
          out.add_form(mode_add(kc, k), g);
        }
      if (za != Complex{})
        for (const auto& [kc, cc] : fc.anti[static_cast<std::size_t>(j - 1)]) {
          FormC g = f;
          g *= cc * za;
          out.add_form(mode_add(kc, k), g);
        }
    }
  return out;
}

FourierForm shape_term(const FourierForm& eta, const FourierForm& u) {
  if (eta.n() != u.n()) throw std::invalid_argument("shape_term: dimension mismatch");
  const int n = u.n();
  const FieldComponents fc = sharp_components(eta);
  const auto phi = holo_coframe(n);
  const auto phib = anti_coframe(n);
  FourierForm out(n);
  // A u = sum_l e^l ^ i_{nabla_{e_l} eta#} u over the unitary frame
  // {V_l, Vbar_l}; the contraction is C-linear in the derived field, whose
  // V_j / Vbar_j components are e_l-derivatives of the scalar components.
  for (const auto& [k, f] : u.modes()) {
    for (int j = 1; j <= n; ++j) {
      for (int comp_anti = 0; comp_anti < 2; ++comp_anti) {
        const ScalarModes& comp = comp_anti ? fc.anti[static_cast<std::size_t>(j - 1)]
                                            : fc.holo[static_cast<std::size_t>(j - 1)];
        if (comp.empty()) continue;
        const FormC contracted = contract_adjoint(
            comp_anti ? phib[static_cast<std::size_t>(j - 1)] : phi[static_cast<std::size_t>(j - 1)], f);
        if (contracted.is_zero()) continue;
        for (int l = 1; l <= n; ++l) {
          for (int frame_anti = 0; frame_anti < 2; ++frame_anti) {
            const FormC wedged = wedge(frame_anti ? phib[static_cast<std::size_t>(l - 1)]
                                                  : phi[static_cast<std::size_t>(l - 1)],
                                       contracted);
            if (wedged.is_zero()) continue;
            for (const auto& [kc, cc] : comp) {
              const Complex deriv = cc * (frame_anti ? zeta_bar(kc, l) : zeta(kc, l));
              if (deriv == Complex{}) continue;
              FormC g = wedged;
              g *= deriv;
              out.add_form(mode_add(kc, k), g);
            }
          }
        }
      }
    }
  }
  return out;
}

FourierForm divergence(const FourierForm& eta) {
  const int n = eta.n();
  const FieldComponents fc = sharp_components(eta);
  FourierForm out(n);
  for (int j = 1; j <= n; ++j) {
    for (const auto& [kc, cc] : fc.holo[static_cast<std::size_t>(j - 1)])
      out.add(kc, MultiIndexPQ{0, 0}, cc * zeta(kc, j));
    for (const auto& [kc, cc] : fc.anti[static_cast<std::size_t>(j - 1)])
      out.add(kc, MultiIndexPQ{0, 0}, cc * zeta_bar(kc, j));
  }
  return out;
}

FourierForm field_norm_sq(const FourierForm& eta) {
  const int n = eta.n();
  const FieldComponents fc = sharp_components(eta);
  FourierForm out(n);
  for (int j = 0; j < n; ++j) {
    accumulate_abs_sq(out, fc.holo[static_cast<std::size_t>(j)]);
    accumulate_abs_sq(out, fc.anti[static_cast<std::size_t>(j)]);
  }
  return out;
}

FourierForm pointwise_norm_sq(const FourierForm& u) {
  // Monomials are orthonormal pointwise, so |u|^2(x) splits per monomial.
  std::map<MultiIndexPQ, ScalarModes, MultiIndexLess> per_monomial;
  for (const auto& [k, f] : u.modes())
    for (const auto& [m, c] : f.terms()) scalar_add(per_monomial[m], k, c);
  FourierForm out(u.n());
  for (const auto& [m, g] : per_monomial) accumulate_abs_sq(out, g);
  return out;
}

// ---- FourierField -------------------------------------------------------------

FourierField::FourierField(FourierForm f) : form_(std::move(f)) {
  if (!form_.homogeneous(0, 1))
    throw std::invalid_argument("FourierField: twisting form must be homogeneous of bidegree (0,1)");
  const Mode z = zero_mode(form_.n());
  double zero_norm = 0.0, rest = 0.0, grad = 0.0;
  for (const auto& [k, f2] : form_.modes()) {
    const double nk = std::sqrt(norm_sq(f2));
    double k2 = 0.0;
    for (int v : k) k2 += static_cast<double>(v) * static_cast<double>(v);
    if (k == z)
      zero_norm = nk;
    else
      rest += nk;
    grad += std::sqrt(k2) * nk;
  }
  c1_ = zero_norm - rest;
  c2_ = std::numbers::sqrt2_v<double> * kPi * grad;
}

FourierField FourierField::scaled(double t) const { return FourierField(Complex(t, 0.0) * form_); }

// ---- basis and assembled operators ---------------------------------------------

FourierBasis fourier_basis(int n, int p, int band) {
  require_dimension(n);
  if (p < 0 || p > n) throw std::invalid_argument("fourier_basis: p out of range");
  if (band < 0) throw std::invalid_argument("fourier_basis: negative band");
  FourierBasis b;
  b.n = n;
  b.p = p;
  b.band = band;
  const long width = 2L * band + 1;
  long total = 1;
  for (int i = 0; i < 2 * n; ++i) {
    total *= width;
    if (total > 4'000'000L) throw std::invalid_argument("fourier_basis: mode box too large");
  }
  b.modes.reserve(static_cast<std::size_t>(total));
  Mode k(static_cast<std::size_t>(2 * n), -band);
  while (true) {
    b.modes.push_back(k);
    int i = 2 * n - 1;
    while (i >= 0 && k[static_cast<std::size_t>(i)] == band) {
      k[static_cast<std::size_t>(i)] = -band;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<std::size_t>(i)];
  }
  for (int q = 0; q <= n; ++q)
    for (const MultiIndexPQ& m : bidegree_basis(n, p, q)) b.monomials.push_back(m);
  return b;
}

int FourierBasis::index_of(const Mode& k, const MultiIndexPQ& m) const {
  if (static_cast<int>(k.size()) != 2 * n) return -1;
  const long width = 2L * band + 1;
  long rank = 0;
  for (int v : k) {
    const long d = static_cast<long>(v) + band;
    if (d < 0 || d >= width) return -1;
    rank = rank * width + d;
  }
  int mi = -1;
  for (std::size_t i = 0; i < monomials.size(); ++i)
    if (monomials[i] == m) {
      mi = static_cast<int>(i);
      break;
    }
  if (mi < 0) return -1;
  return static_cast<int>(rank * static_cast<long>(monomials.size()) + mi);
}

FourierForm FourierBasis::element(int index) const {
  const int m = static_cast<int>(monomials.size());
  if (index < 0 || index >= size()) throw std::out_of_range("FourierBasis: index out of range");
  FourierForm out(n);
  out.add(modes[static_cast<std::size_t>(index / m)], monomials[static_cast<std::size_t>(index % m)],
          Complex(1.0, 0.0));
  return out;
}

namespace {

template <class Op>
EigenC materialize(const FourierBasis& b, Op&& op) {
  const int sz = b.size();
  EigenC mat = EigenC::Zero(sz, sz);
  for (int c = 0; c < sz; ++c) {
    const FourierForm out = op(b.element(c));
    for (const auto& [k, f] : out.modes())
      for (const auto& [m, coef] : f.terms()) {
        const int r = b.index_of(k, m);
        if (r >= 0) mat(r, c) += coef;
      }
  }
  return mat;
}

}  // namespace

OperatorBlock assemble_operators(const TorusSpec& spec, const FourierField& theta, int p) {
  require_spec(spec);
  require_degree_p(spec, p);
  if (theta.n() != spec.n) throw std::invalid_argument("assemble_operators: dimension mismatch");
  if (spec.cutoff < theta.band())
    throw BandOverflow("cutoff too small: cutoff must be at least band(theta)");
  OperatorBlock blk;
  blk.basis = fourier_basis(spec.n, p, spec.cutoff + theta.band());
  const FourierForm& th = theta.form();
  blk.dbar = materialize(blk.basis, [](const FourierForm& u) { return dbar(u); });
  blk.dbar_star = materialize(blk.basis, [](const FourierForm& u) { return dbar_adjoint(u); });
  blk.theta_wedge = materialize(blk.basis, [&th](const FourierForm& u) { return wedge(th, u); });
  blk.theta_contract =
      materialize(blk.basis, [&th](const FourierForm& u) { return contract_adjoint(th, u); });
  return blk;
}

namespace {

// Band-truncated twisted Dirac block split as base + t * twist, with the
// t-independent pieces assembled once so a scan over t reuses them.
struct DiracSplit {
  FourierBasis basis;
  std::vector<int> even_index, odd_index;
  EigenC base, twist;
};

DiracSplit make_dirac_split(const TorusSpec& spec, const FourierField& theta, int p) {
  require_spec(spec);
  require_degree_p(spec, p);
  if (theta.n() != spec.n) throw std::invalid_argument("fourier_dirac: dimension mismatch");
  DiracSplit s;
  s.basis = fourier_basis(spec.n, p, spec.cutoff);
  const int sz = s.basis.size();
  const int m = static_cast<int>(s.basis.monomials.size());
  std::vector<int> pos(static_cast<std::size_t>(sz), -1);
  for (int i = 0; i < sz; ++i) {
    const bool even = (s.basis.monomials[static_cast<std::size_t>(i % m)].q() & 1) == 0;
    auto& list = even ? s.even_index : s.odd_index;
    pos[static_cast<std::size_t>(i)] = static_cast<int>(list.size());
    list.push_back(i);
  }
  const int rows = static_cast<int>(s.odd_index.size());
  const int cols = static_cast<int>(s.even_index.size());
  s.base = EigenC::Zero(rows, cols);
  s.twist = EigenC::Zero(rows, cols);
  const FourierForm& th = theta.form();
  for (int c = 0; c < cols; ++c) {
    const FourierForm u = s.basis.element(s.even_index[static_cast<std::size_t>(c)]);
    auto project = [&](const FourierForm& out, EigenC& mat) {
      for (const auto& [k, f] : out.modes())
        for (const auto& [mono, coef] : f.terms()) {
          const int gi = s.basis.index_of(k, mono);
          if (gi >= 0) mat(pos[static_cast<std::size_t>(gi)], c) += coef;
        }
    };
    project(dbar(u) + dbar_adjoint(u), s.base);
    project(wedge(th, u) + contract_adjoint(th, u), s.twist);
  }
  return s;
}

FourierForm even_vector_form(const DiracSplit& s, const Eigen::VectorXcd& x) {
  const int m = static_cast<int>(s.basis.monomials.size());
  FourierForm alpha(s.basis.n);
  for (int i = 0; i < static_cast<int>(s.even_index.size()); ++i) {
    const int gi = s.even_index[static_cast<std::size_t>(i)];
    alpha.add(s.basis.modes[static_cast<std::size_t>(gi / m)],
              s.basis.monomials[static_cast<std::size_t>(gi % m)], x(i));
  }
  return alpha;
}

// Smallest eigenpair of a Hermitian positive semidefinite matrix by inverse
// power iteration, deterministic all-ones start.  An exactly singular factor
// gets a relatively negligible ridge so the iteration stays defined; the
// Rayleigh quotient is always taken against the original matrix.
std::pair<double, Eigen::VectorXcd> smallest_eigenpair(const EigenC& g) {
  const Eigen::Index m = g.rows();
  if (m == 0) return {0.0, Eigen::VectorXcd()};

  // Inverse power iteration on a ridged copy of g. The ridge keeps the
  // Cholesky factorization well defined when g is exactly singular (LLT, in
  // contrast to LDLT, never pseudo-inverts a zero pivot away, so the null
  // direction is amplified rather than silently dropped). Every reported
  // Rayleigh quotient is taken against the original matrix, so the ridge
  // never biases the returned eigenvalue.
  const double gmax = std::max(g.cwiseAbs().maxCoeff(), 1.0);
  double delta = 1e-12 * gmax;
  Eigen::LLT<EigenC> llt;
  for (int attempt = 0; attempt < 4; ++attempt) {
    EigenC gr = g;
    gr.diagonal().array() += delta;
    llt.compute(gr);
    if (llt.info() == Eigen::Success) break;
    delta *= 1e3;
  }

  Eigen::VectorXcd x =
      Eigen::VectorXcd::Constant(m, Complex(1.0 / std::sqrt(static_cast<double>(m)), 0.0));
  double lambda = x.dot(g * x).real();
  if (llt.info() != Eigen::Success) return {std::max(lambda, 0.0), x};

  // Eigenvalues below roundoff in the assembly of g are numerically zero;
  // the absolute floor lets the iteration settle there instead of chasing
  // noise with a purely relative test.
  const double floor_abs = 0.01 * std::numeric_limits<double>::epsilon() * gmax;
  for (int iter = 0; iter < 500; ++iter) {
    Eigen::VectorXcd y = llt.solve(x);
    const double ny = y.norm();
    if (!y.allFinite() || !(ny > 0.0) || !std::isfinite(ny)) break;
    x = y / ny;
    const double next = x.dot(g * x).real();
    const bool converged =
        std::abs(next - lambda) <= kSigmaRelTol * std::max(std::abs(next), std::abs(lambda)) + floor_abs;
    lambda = next;
    if (converged) break;
  }
  return {std::max(lambda, 0.0), x};
}

}  // namespace

DiracTruncation fourier_dirac(const TorusSpec& spec, const FourierField& theta, int p, double t) {
  DiracSplit s = make_dirac_split(spec, theta, p);
  DiracTruncation out;
  out.basis = std::move(s.basis);
  out.even_index = std::move(s.even_index);
  out.odd_index = std::move(s.odd_index);
  out.even_to_odd = s.base + t * s.twist;
  return out;
}

double sigma_min_inverse_power(const EigenC& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const EigenC g = a.adjoint() * a;
  return std::sqrt(smallest_eigenpair(g).first);
}

// ---- integral identity checks ---------------------------------------------------

LieIdentityCheck lie_identity_check(const TorusSpec& spec, const FourierField& theta,
                                    const FourierForm& u, const FourierForm& v) {
  require_spec(spec);
  if (theta.n() != spec.n) throw std::invalid_argument("lie_identity_check: dimension mismatch");
  require_same_n(spec.n, u, "lie_identity_check");
  require_same_n(spec.n, v, "lie_identity_check");
  const int need = std::max(u.band(), v.band()) + theta.band();
  if (spec.cutoff < need)
    throw BandOverflow("cutoff too small: need cutoff >= band(argument) + band(theta)");
  const FourierForm eta = theta.form() + conj(theta.form());
  LieIdentityCheck c{};
  c.lie_side = l2_inner(lie_deriv(eta, u), v);
  c.adjoint_side = l2_inner(contract_adjoint(eta, u), codifferential(v)) +
                   l2_inner(exterior_d(u), wedge(eta, v));
  c.covariant_side = l2_inner(covariant_deriv(eta, u), v) + l2_inner(shape_term(eta, u), v);
  c.residual = std::max({std::abs(c.lie_side - c.adjoint_side), std::abs(c.lie_side - c.covariant_side),
                         std::abs(c.adjoint_side - c.covariant_side)});
  return c;
}

DivergenceIdentityCheck divergence_identity_check(const TorusSpec& spec, const FourierField& theta,
                                                  const FourierForm& u) {
  require_spec(spec);
  if (theta.n() != spec.n)
    throw std::invalid_argument("divergence_identity_check: dimension mismatch");
  require_same_n(spec.n, u, "divergence_identity_check");
  if (spec.cutoff < u.band() + theta.band())
    throw BandOverflow("cutoff too small: need cutoff >= band(u) + band(theta)");
  const FourierForm eta = theta.form() + conj(theta.form());
  DivergenceIdentityCheck c{};
  c.lhs = 2.0 * l2_inner(lie_deriv(eta, u), u).real();
  const double shape = 2.0 * l2_inner(shape_term(eta, u), u).real();
  const double div_term = integral(wedge(divergence(eta), pointwise_norm_sq(u))).real();
  c.rhs = shape - div_term;
  c.residual = std::abs(c.lhs - c.rhs);
  return c;
}

KernelIdentityCheck kernel_identity_check(const TorusSpec& spec, const FourierField& theta,
                                          const FourierForm& alpha) {
  require_spec(spec);
  if (theta.n() != spec.n) throw std::invalid_argument("kernel_identity_check: dimension mismatch");
  require_same_n(spec.n, alpha, "kernel_identity_check");
  const FourierForm& th = theta.form();
  const FourierForm d_alpha =
      dbar(alpha) + dbar_adjoint(alpha) + wedge(th, alpha) + contract_adjoint(th, alpha);
  KernelIdentityCheck c{};
  c.dirac_residual = d_alpha.norm();
  c.alpha_norm = alpha.norm();
  c.precondition_met = c.dirac_residual <= 1e-8 * std::max(c.alpha_norm, 1e-300);
  c.weighted_norm = integral(wedge(field_norm_sq(th), pointwise_norm_sq(alpha))).real();
  c.curvature_term = -l2_inner(alpha, wedge(dbar(th), alpha)).real();
  c.lie_term = -l2_inner(lie_deriv(th, alpha), alpha).real();
  c.residual = std::abs(c.weighted_norm - c.curvature_term - c.lie_term);
  const double denom = c.dirac_residual * c.alpha_norm;
  c.empirical_ratio = denom > 0.0 ? c.residual / denom : 0.0;
  return c;
}

KernelProbe kernel_probe(const TorusSpec& spec, const FourierField& theta, int p, double t) {
  const DiracSplit s = make_dirac_split(spec, theta, p);
  const EigenC d = s.base + t * s.twist;
  const auto [lambda, x] = smallest_eigenpair(EigenC(d.adjoint() * d));
  KernelProbe out;
  out.sigma_min = std::sqrt(lambda);
  out.vacuous = out.sigma_min > kWitnessFloor;
  out.alpha = even_vector_form(s, x);
  if (!out.vacuous) out.check = kernel_identity_check(spec, theta.scaled(t), out.alpha);
  return out;
}

// ---- spectral witness scan -------------------------------------------------------

int scan_thread_cap() {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const char* env = std::getenv("TWISTED_HODGE_THREADS");
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || (end && *end)) return hw;
  return static_cast<int>(std::clamp(v, 1L, static_cast<long>(hw)));
}

ScanResult sigma_min_scan(const TorusSpec& spec, const FourierField& theta, int p,
                          const std::vector<double>& t_grid) {
  require_spec(spec);
  require_degree_p(spec, p);
  if (theta.n() != spec.n) throw std::invalid_argument("sigma_min_scan: dimension mismatch");
  if (!theta.nowhere_vanishing()) throw NotNowhereVanishing(theta.lower_bound());
  ScanResult res;
  res.cutoff = spec.cutoff;
  res.refined_cutoff = spec.cutoff + 2;
  res.c1 = theta.lower_bound();
  res.c2 = theta.gradient_bound();
  if (t_grid.empty()) return res;
  const DiracSplit coarse = make_dirac_split(spec, theta, p);
  const DiracSplit fine = make_dirac_split(TorusSpec{spec.n, res.refined_cutoff}, theta, p);
  res.points.assign(t_grid.size(), ScanPoint{});
  auto eval = [&](std::size_t i) {
    const double t = t_grid[i];
    ScanPoint pt{};
    pt.t = t;
    const EigenC dc = coarse.base + t * coarse.twist;
    pt.sigma_even = sigma_min_inverse_power(dc);
    pt.sigma_odd = sigma_min_inverse_power(EigenC(dc.adjoint()));
    const EigenC df = fine.base + t * fine.twist;
    pt.sigma_even_refined = sigma_min_inverse_power(df);
    pt.sigma_odd_refined = sigma_min_inverse_power(EigenC(df.adjoint()));
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    pt.stable = rel(pt.sigma_even, pt.sigma_even_refined) < kStabilityTol &&
                rel(pt.sigma_odd, pt.sigma_odd_refined) < kStabilityTol;
    res.points[i] = pt;
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(scan_thread_cap()), t_grid.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < t_grid.size(); ++i) eval(i);
  } else {
    // Grid points land in preassigned slots and workers join in fixed order,
    // so results are identical for every thread count.
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, [&eval, &t_grid, w, workers] {
        for (std::size_t i = w; i < t_grid.size(); i += workers) eval(i);
      }));
    for (auto& f : futures) f.get();
  }
  for (std::size_t i = 0; i < res.points.size(); ++i)
    if (res.points[i].sigma_even > kWitnessFloor && res.points[i].sigma_odd > kWitnessFloor) {
      res.witness_index = static_cast<int>(i);
      break;
    }
  return res;
}

}  // namespace thodge
