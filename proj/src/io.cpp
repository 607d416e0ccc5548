#include "qedist/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qedist {

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InputError("matrix must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw InputError("matrix must be square (row " + std::to_string(i) + " has the wrong length)");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& e = row[k];
      if (e.is_number()) {
        m(i, k) = cplx(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
        m(i, k) = cplx(e[0].get<double>(), e[1].get<double>());
      } else {
        throw InputError("matrix entry (" + std::to_string(i) + "," + std::to_string(k) +
                         ") must be a number or [re, im]");
      }
    }
  }
  return m;
}

json state_to_json(const HermitianOperator& x) {
  return {{"d_a", x.d_a()}, {"d_b", x.d_b()}, {"matrix", matrix_to_json(x.matrix())}};
}

DensityOperator state_from_json(const json& j) {
  if (!j.is_object()) throw InputError("state file must hold a JSON object");
  for (const char* key : {"d_a", "d_b", "matrix"})
    if (!j.contains(key)) throw InputError(std::string("state file is missing \"") + key + "\"");
  if (!j["d_a"].is_number_integer() || !j["d_b"].is_number_integer())
    throw InputError("d_a and d_b must be integers");
  const int da = j["d_a"].get<int>();
  const int db = j["d_b"].get<int>();
  if (da < 1 || db < 1) throw DimensionError("local dimensions must be positive");
  CMatrix m = matrix_from_json(j["matrix"]);
  if (m.rows() != static_cast<Eigen::Index>(da) * db)
    throw DimensionError("matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.rows()) +
                         " but d_a*d_b = " + std::to_string(da * db));
  return DensityOperator(da, db, std::move(m));
}

DensityOperator load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("state file " + path + " is not valid JSON: " + e.what());
  }
  return state_from_json(j);
}

void save_state(const std::string& path, const DensityOperator& rho) {
  write_json_file(path, state_to_json(rho.op()));
}

SchmidtInput parse_schmidt_csv(const std::string& text) {
  SchmidtInput out;
  std::vector<double> sq;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t\r\n"));
    item.erase(item.find_last_not_of(" \t\r\n") + 1);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InputError("not a number in Schmidt list: '" + item + "'");
    if (!(v >= 0.0)) throw InputError("squared Schmidt coefficients must be non-negative");
    sq.push_back(v);
  }
  if (sq.empty()) throw InputError("empty Schmidt list");
  double total = 0.0;
  for (double v : sq) total += v;
  if (std::abs(total - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "squared Schmidt coefficients sum to " << total << "; renormalized";
    out.warnings.push_back(os.str());
  }
  std::sort(sq.begin(), sq.end(), std::greater<>());
  out.xi = SchmidtVector::from_squared(sq);
  return out;
}

json to_json(const DistillationResult& r) {
  json j = {{"quantity", to_string(r.quantity)},
            {"class", to_string(r.op)},
            {"value", r.value},
            {"epsilon", r.epsilon},
            {"method", to_string(r.method)},
            {"lower_bound", r.lower_bound},
            {"solver", {{"iterations", r.solver_iterations}, {"duality_gap", r.duality_gap}}}};
  if (r.quantity == Quantity::fidelity || r.quantity == Quantity::assisted_fidelity) {
    j["m"] = r.m;
  } else {
    j["k"] = r.k;
    j["rate"] = rate_string(r.k);
  }
  if (!r.note.empty()) j["note"] = r.note;
  j["certificate"] = r.certificate ? state_to_json(*r.certificate) : json(nullptr);
  return j;
}

json to_json(const MonotoneValue& v) {
  json j = {{"value", v.value}, {"method", v.method}};
  if (v.method == "sdp")
    j["solver"] = {{"iterations", v.report.iterations}, {"duality_gap", v.report.duality_gap}};
  j["witness"] = v.witness ? state_to_json(*v.witness) : json(nullptr);
  return j;
}

json to_json(const MNormResult& r) {
  return {{"value", r.value}, {"k_star", r.k_star}, {"head", r.head}, {"tail", r.tail}};
}

namespace {
const char* kind_name(CaseKind k) {
  switch (k) {
    case CaseKind::equal: return "equal";
    case CaseKind::at_most: return "at_most";
    case CaseKind::at_least: return "at_least";
  }
  return "?";
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
}  // namespace

json to_json(const ReproReport& r) {
  json cases = json::array();
  std::size_t passed = 0;
  for (const ReproCase& c : r.cases) {
    json e = {{"description", c.description},
              {"expected", finite_or_null(c.expected)},
              {"computed", finite_or_null(c.computed)},
              {"tolerance", c.tolerance},
              {"kind", kind_name(c.kind)},
              {"pass", c.pass}};
    if (!c.error.empty()) e["error"] = c.error;
    passed += c.pass;
    cases.push_back(std::move(e));
  }
  return {{"suite", to_string(r.suite)},
          {"d", r.d},
          {"seed", r.seed},
          {"passed", passed},
          {"total", r.cases.size()},
          {"pass", r.passed()},
          {"cases", std::move(cases)}};
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw InputError("write failed for " + path);
}

}  // namespace qedist
