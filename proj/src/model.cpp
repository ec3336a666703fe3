#include "thodge/model.hpp"

#include <bit>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

namespace thodge {

namespace {

FormQ project_bidegree(const FormQ& f, int p, int q) {
  FormQ out(f.n());
  for (const auto& [m, c] : f.terms())
    if (m.p() == p && m.q() == q) out.add_term(m, c);
  return out;
}

// d of a single monomial by the Leibniz rule.  Each d(generator) has even
// degree, so it commutes past the remaining one-form factors and the sign is
// just the position of the factor being differentiated.
FormQ d_monomial(const LieComplexModel& model, const MultiIndexPQ& m, const GaussianRational& c) {
  FormQ out(model.n);
  int pos = 0;
  for (int i = 0; i < model.n; ++i) {
    if (!(m.holo & (1u << i))) continue;
    FormQ rest = monomial_form<GaussianRational>(model.n, {m.holo & ~(1u << i), m.anti},
                                                 (pos & 1) ? -c : c);
    out += wedge(model.d_holo[i], rest);
    ++pos;
  }
  for (int i = 0; i < model.n; ++i) {
    if (!(m.anti & (1u << i))) continue;
    FormQ rest = monomial_form<GaussianRational>(model.n, {m.holo, m.anti & ~(1u << i)},
                                                 (pos & 1) ? -c : c);
    out += wedge(model.d_anti[i], rest);
    ++pos;
  }
  return out;
}

// Generator index g in [0, 2n): holomorphic first.
FormQ d_generator(const LieComplexModel& model, int g) {
  return g < model.n ? model.d_holo[g] : model.d_anti[g - model.n];
}

}  // namespace

FormQ d_form(const LieComplexModel& model, const FormQ& f) {
  FormQ out(model.n);
  for (const auto& [m, c] : f.terms()) out += d_monomial(model, m, c);
  return out;
}

FormQ dbar_form(const LieComplexModel& model, const FormQ& f) {
  FormQ out(model.n);
  for (const auto& [m, c] : f.terms())
    out += project_bidegree(d_monomial(model, m, c), m.p(), m.q() + 1);
  return out;
}

FormQ partial_form(const LieComplexModel& model, const FormQ& f) {
  FormQ out(model.n);
  for (const auto& [m, c] : f.terms())
    out += project_bidegree(d_monomial(model, m, c), m.p() + 1, m.q());
  return out;
}

GradedOperator<GaussianRational> build_dbar(const LieComplexModel& model) {
  return assemble_graded(model.n, 0, 1, [&](const FormQ& f) { return dbar_form(model, f); });
}

GradedOperator<GaussianRational> build_partial(const LieComplexModel& model) {
  return assemble_graded(model.n, 1, 0, [&](const FormQ& f) { return partial_form(model, f); });
}

GaussianRational adjoint_trace(const LieComplexModel& model, int g) {
  // d eps^c = -(1/2) F^c_{ab} eps^a ^ eps^b; the trace of ad on the frame
  // vector dual to eps^g is sum_a F^a_{ag}, read off the coefficients of
  // eps^a ^ eps^g in d eps^a (sign flips when g precedes a).
  const int n = model.n;
  GaussianRational tr(0);
  for (int a = 0; a < 2 * n; ++a) {
    if (a == g) continue;
    int lo = std::min(a, g), hi = std::max(a, g);
    MultiIndexPQ m{0, 0};
    for (int x : {lo, hi})
      (x < n ? m.holo : m.anti) |= 1u << (x < n ? x : x - n);
    GaussianRational coeff = d_generator(model, a).coeff(m);
    tr += (a < g) ? -coeff : coeff;
  }
  return tr;
}

ValidationReport validate(const LieComplexModel& model) {
  ValidationReport rep;
  const int n = model.n;
  if (n < 1 || n > kMaxGenerators) {
    rep.fail("dimension out of range");
    return rep;
  }
  if (static_cast<int>(model.d_holo.size()) != n || static_cast<int>(model.d_anti.size()) != n) {
    rep.fail("structure tables must list d for all generators");
    return rep;
  }
  for (int k = 0; k < n; ++k) {
    const FormQ& d = model.d_holo[k];
    for (const auto& [m, c] : d.terms()) {
      (void)c;
      if (m.degree() != 2) {
        rep.fail("d phi^" + std::to_string(k + 1) + " has a term of degree != 2");
        break;
      }
      if (m.p() == 0) {
        rep.fail("d phi^" + std::to_string(k + 1) + " has a (0,2)-component, complex structure is not integrable");
        break;
      }
    }
    if (!(conj(model.d_holo[k]) == model.d_anti[k]))
      rep.fail("d phibar^" + std::to_string(k + 1) + " is not the conjugate of d phi^" + std::to_string(k + 1));
  }
  if (!rep.ok) return rep;
  for (int g = 0; g < 2 * n; ++g) {
    FormQ dd = d_form(model, d_generator(model, g));
    if (!dd.is_zero()) {
      rep.fail("d^2 != 0 on generator " + std::to_string(g + 1));
      return rep;
    }
  }
  for (int g = 0; g < 2 * n; ++g)
    if (!adjoint_trace(model, g).is_zero()) {
      rep.fail("algebra is not unimodular (adjoint trace " + std::to_string(g + 1) +
               " nonzero), inner products would need a correction factor");
      break;
    }
  return rep;
}

// ---- builders ----------------------------------------------------------------

LieComplexModel torus_model(int n) {
  LieComplexModel m;
  m.name = "torus_n" + std::to_string(n);
  m.n = n;
  m.d_holo.assign(n, FormQ(n));
  m.d_anti.assign(n, FormQ(n));
  m.theta_examples["zero"] = FormQ(n);
  FormQ b1(n);
  b1.add_term({0, 1}, GaussianRational(1));
  m.theta_examples["phi_bar_1"] = b1;
  return m;
}

namespace {
GaussianRational half_i() {
  GaussianRational g;
  g.im = Rational(1, 2);
  return g;
}
}  // namespace

LieComplexModel kodaira_thurston() {
  LieComplexModel m;
  m.name = "kodaira_thurston";
  m.n = 2;
  m.d_holo.assign(2, FormQ(2));
  // d phi^2 = (i/2) phi^1 ^ phibar^1
  m.d_holo[1].add_term({0b01, 0b01}, half_i());
  m.d_anti = {conj(m.d_holo[0]), conj(m.d_holo[1])};
  m.theta_examples["zero"] = FormQ(2);
  FormQ b1(2), b2(2), lee(2);
  b1.add_term({0, 0b01}, GaussianRational(1));
  b2.add_term({0, 0b10}, GaussianRational(1));
  lee.add_term({0, 0b10}, half_i());
  m.theta_examples["phi_bar_1"] = b1;
  m.theta_examples["phi_bar_2"] = b2;
  m.theta_examples["lee_01"] = lee;
  return m;
}

LieComplexModel hopf_surface() {
  LieComplexModel m;
  m.name = "hopf_surface";
  m.n = 2;
  m.d_holo.assign(2, FormQ(2));
  // d phi^1 = (i/2)(phi^1 ^ phi^2 + phi^1 ^ phibar^2)
  m.d_holo[0].add_term({0b11, 0}, half_i());
  m.d_holo[0].add_term({0b01, 0b10}, half_i());
  // d phi^2 = (1/2 + i/2) phi^1 ^ phibar^1, normalized so the torsion
  // one-form has unit length.
  GaussianRational c;
  c.re = Rational(1, 2);
  c.im = Rational(1, 2);
  m.d_holo[1].add_term({0b01, 0b01}, c);
  m.d_anti = {conj(m.d_holo[0]), conj(m.d_holo[1])};
  m.theta_examples["zero"] = FormQ(2);
  FormQ b1(2), lee(2);
  b1.add_term({0, 0b01}, GaussianRational(1));
  lee.add_term({0, 0b10}, c);
  m.theta_examples["phi_bar_1"] = b1;
  m.theta_examples["lee_01"] = lee;
  return m;
}

// ---- serialization -----------------------------------------------------------

namespace {

using nlohmann::json;

GaussianRational coeff_from_string(const std::string& s, const char* where, bool lenient) {
  auto v = lenient ? parse_gaussian_rational_lenient(s) : parse_gaussian_rational(s);
  if (!v) throw std::runtime_error(std::string(where) + ": cannot parse coefficient '" + s + "'");
  return *v;
}

}  // namespace

LieComplexModel load_model_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("model JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("model JSON: top level must be an object");
  LieComplexModel m;
  m.name = j.value("name", std::string("unnamed"));
  if (!j.contains("n") || !j["n"].is_number_integer()) throw std::runtime_error("model JSON: missing dimension 'n'");
  m.n = j["n"].get<int>();
  if (m.n < 1 || m.n > kMaxGenerators) throw std::runtime_error("model JSON: dimension out of range");
  std::string mode = j.value("mode", std::string("exact"));
  if (mode != "exact" && mode != "numeric")
    throw std::runtime_error("model JSON: mode must be \"exact\" or \"numeric\"");
  // Numeric mode admits decimal coefficient literals; they convert to exact
  // rationals with no loss, so downstream arithmetic is identical.
  const bool lenient = mode == "numeric";
  m.d_holo.assign(m.n, FormQ(m.n));
  if (j.contains("dphi")) {
    const auto& dp = j["dphi"];
    if (!dp.is_object()) throw std::runtime_error("model JSON: 'dphi' must map generator index to term list");
    for (const auto& [key, terms] : dp.items()) {
      int k = 0;
      try {
        k = std::stoi(key);
      } catch (...) {
        throw std::runtime_error("model JSON: dphi key '" + key + "' is not a generator index");
      }
      if (k < 1 || k > m.n) throw std::runtime_error("model JSON: dphi key '" + key + "' out of range");
      if (!terms.is_array()) throw std::runtime_error("model JSON: dphi entry must be a term list");
      for (const auto& term : terms) {
        std::string bd = term.value("bidegree", std::string());
        GaussianRational c = coeff_from_string(term.value("coeff", std::string("0")), "dphi", lenient);
        int i = term.value("i", 0);
        if (i < 1 || i > m.n) throw std::runtime_error("model JSON: dphi term index 'i' out of range");
        if (bd == "(2,0)") {
          int jj = term.value("j", 0);
          if (jj <= i || jj > m.n) throw std::runtime_error("model JSON: (2,0) term needs i < j <= n");
          m.d_holo[k - 1].add_term({(1u << (i - 1)) | (1u << (jj - 1)), 0}, c);
        } else if (bd == "(1,1)") {
          int jb = term.value("jbar", 0);
          if (jb < 1 || jb > m.n) throw std::runtime_error("model JSON: (1,1) term index 'jbar' out of range");
          m.d_holo[k - 1].add_term({1u << (i - 1), 1u << (jb - 1)}, c);
        } else {
          // (0,2) terms are unrepresentable by design: integrability is
          // enforced by the schema itself.
          throw std::runtime_error("model JSON: term bidegree must be \"(2,0)\" or \"(1,1)\"");
        }
      }
    }
  }
  m.d_anti.clear();
  for (int k = 0; k < m.n; ++k) m.d_anti.push_back(conj(m.d_holo[k]));
  if (j.contains("theta_examples")) {
    for (const auto& [label, arr] : j["theta_examples"].items()) {
      if (!arr.is_array())
        throw std::runtime_error("model JSON: theta example '" + label + "' must be a term list");
      FormQ theta(m.n);
      for (const auto& term : arr) {
        int jb = term.value("jbar", 0);
        if (jb < 1 || jb > m.n)
          throw std::runtime_error("model JSON: theta example '" + label + "' has index out of range");
        theta.add_term({0, 1u << (jb - 1)}, coeff_from_string(term.value("coeff", std::string("0")), "theta_examples", lenient));
      }
      m.theta_examples[label] = theta;
    }
  }
  return m;
}

LieComplexModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model_json(ss.str());
}

std::optional<LieComplexModel> find_bundled_model(const std::string& name) {
  for (const std::string& dir : {std::string(THODGE_MODEL_DIR), std::string("models")}) {
    std::string path = dir + "/" + name + ".json";
    std::ifstream probe(path);
    if (probe) return load_model_file(path);
  }
  return std::nullopt;
}

std::string to_string(const FormQ& f) {
  if (f.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : f.terms()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")";
    if (m.degree() > 0) out += " " + to_string(m);
  }
  return out;
}

}  // namespace thodge
