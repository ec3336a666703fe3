#include "thodge/genus.hpp"

#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace thodge {

HodgeTable HodgeTable::from_cohomology(const CohomologyTable& table) {
  HodgeTable out(table.n);
  for (const auto& [pq, dim] : table.dims) out.at(pq.first, pq.second) = dim;
  return out;
}

bool operator==(const ChiPolynomial& a, const ChiPolynomial& b) {
  size_t len = std::max(a.coeffs.size(), b.coeffs.size());
  for (size_t i = 0; i < len; ++i) {
    long long ca = i < a.coeffs.size() ? a.coeffs[i] : 0;
    long long cb = i < b.coeffs.size() ? b.coeffs[i] : 0;
    if (ca != cb) return false;
  }
  return true;
}

std::string to_string(const ChiPolynomial& poly) {
  std::ostringstream os;
  bool first = true;
  for (size_t p = 0; p < poly.coeffs.size(); ++p) {
    long long c = poly.coeffs[p];
    if (c == 0) continue;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    long long mag = c < 0 ? -c : c;
    if (mag != 1 || p == 0) os << mag;
    if (p == 1) os << "y";
    if (p > 1) os << "y^" << p;
  }
  if (first) os << "0";
  return os.str();
}

ChiPolynomial chi(const HodgeTable& table) {
  ChiPolynomial poly;
  poly.coeffs.assign(static_cast<size_t>(table.n) + 1, 0);
  for (int p = 0; p <= table.n; ++p)
    for (int q = 0; q <= table.n; ++q)
      poly.coeffs[static_cast<size_t>(p)] += (q % 2 == 0 ? 1 : -1) * table.at(p, q);
  return poly;
}

ChiSpecialValues chi_special_values(const ChiPolynomial& poly, bool kahler_even_dim) {
  ChiSpecialValues out;
  out.arithmetic_genus = poly.coeffs.empty() ? 0 : poly.coeffs[0];
  out.y_one = poly.value_at(1);
  out.signature_caveat = !kahler_even_dim;
  out.euler_number = poly.value_at(-1);
  return out;
}

ChiPolynomial kosniowski_sum(const std::vector<int>& s_values, int n) {
  if (n < 0) throw std::invalid_argument("kosniowski_sum: negative dimension");
  ChiPolynomial poly;
  poly.coeffs.assign(static_cast<size_t>(n) + 1, 0);
  for (int s : s_values) {
    if (s < 0 || s > n) throw std::invalid_argument("kosniowski_sum: s out of range [0, n]");
    poly.coeffs[static_cast<size_t>(s)] += (s % 2 == 0 ? 1 : -1);
  }
  return poly;
}

HodgeTable kunneth_product(const HodgeTable& a, const HodgeTable& b) {
  HodgeTable out(a.n + b.n);
  for (int p = 0; p <= out.n; ++p)
    for (int q = 0; q <= out.n; ++q) {
      int acc = 0;
      for (int i = 0; i <= a.n; ++i)
        for (int j = 0; j <= a.n; ++j) acc += a.at(i, j) * b.at(p - i, q - j);
      out.at(p, q) = acc;
    }
  return out;
}

bool STable::symmetric() const {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < a; ++b)
      if (at(a, b) != at(b, a)) return false;
  return true;
}

HodgeTable vaisman_hodge(const STable& st) {
  if (!st.symmetric()) throw std::invalid_argument("vaisman_hodge: transverse table must be symmetric");
  const int n = st.n;
  HodgeTable out(n);
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q) {
      if (p + q <= n - 1)
        out.at(p, q) = st.at(p, q) + st.at(p, q - 1);
      else if (p + q == n)
        out.at(p, q) = st.at(p - 1, n - p) + st.at(p, n - p - 1);
    }
  // Duality fill second: the mirror of a p+q > n cell sits strictly below the
  // antidiagonal, so it is complete only after the first pass.
  for (int p = 0; p <= n; ++p)
    for (int q = 0; q <= n; ++q)
      if (p + q > n) out.at(p, q) = out.at(n - p, n - q);
  if (!chi(out).is_zero()) throw std::logic_error("vaisman_hodge: chi_y failed to vanish");
  return out;
}

std::vector<int> parallel_decomposition_chi(const LieComplexModel& model, const FormQ& theta) {
  std::vector<int> out;
  for (int p = 0; p <= model.n; ++p) {
    int acc = 0;
    for (int q = 0; q <= model.n; ++q) {
      auto pd = primitive_decomposition(model, theta, p, q);
      if (!pd.reconstructed) throw std::logic_error("parallel_decomposition_chi: reconstruction failed");
      int h = pd.s_pq + pd.s_pm1_q + pd.s_p_qm1 + pd.s_pm1_qm1;
      acc += (q % 2 == 0 ? 1 : -1) * h;
    }
    out.push_back(acc);
  }
  return out;
}

// ---- serialization -----------------------------------------------------------

namespace {

nlohmann::json grid_json(int n, const std::vector<std::vector<int>>& grid, const char* key) {
  nlohmann::json j;
  j["n"] = n;
  j[key] = grid;
  return j;
}

std::string grid_csv(const std::vector<std::vector<int>>& grid) {
  std::ostringstream os;
  os << "p\\q";
  if (!grid.empty())
    for (size_t q = 0; q < grid[0].size(); ++q) os << "," << q;
  os << "\n";
  for (size_t p = 0; p < grid.size(); ++p) {
    os << p;
    for (int v : grid[p]) os << "," << v;
    os << "\n";
  }
  return os.str();
}

std::vector<std::vector<int>> grid_from_json(const nlohmann::json& j, const char* key, int n, int size) {
  if (!j.contains(key) || !j[key].is_array()) throw std::runtime_error(std::string("missing grid '") + key + "'");
  auto grid = j[key].get<std::vector<std::vector<int>>>();
  if (static_cast<int>(grid.size()) != size) throw std::runtime_error("grid has wrong number of rows");
  for (const auto& row : grid) {
    if (static_cast<int>(row.size()) != size) throw std::runtime_error("grid row has wrong length");
    for (int v : row)
      if (v < 0) throw std::runtime_error("grid entries must be nonnegative");
  }
  (void)n;
  return grid;
}

}  // namespace

std::string to_json(const HodgeTable& table) { return grid_json(table.n, table.h, "h").dump(); }
std::string to_csv(const HodgeTable& table) { return grid_csv(table.h); }
std::string to_json(const STable& st) { return grid_json(st.n, st.s, "s").dump(); }
std::string to_csv(const STable& st) { return grid_csv(st.s); }

HodgeTable hodge_table_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("n") || !j["n"].is_number_integer()) throw std::runtime_error("missing integer 'n'");
  HodgeTable out(j["n"].get<int>());
  out.h = grid_from_json(j, "h", out.n, out.n + 1);
  return out;
}

STable stable_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("n") || !j["n"].is_number_integer()) throw std::runtime_error("missing integer 'n'");
  int n = j["n"].get<int>();
  if (n < 1) throw std::runtime_error("'n' must be positive");
  STable out(n);
  out.s = grid_from_json(j, "s", n, n);
  return out;
}

}  // namespace thodge
