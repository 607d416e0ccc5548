#include "qedist/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qedist/hypothesis.hpp"
#include "qedist/io.hpp"

namespace qedist {

namespace {

using Rows = std::vector<std::pair<std::string, std::string>>;

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void print_table(std::ostream& out, const Rows& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.first.size());
  for (const auto& [k, v] : rows) out << std::left << std::setw(static_cast<int>(w) + 2) << k << v << '\n';
}

Rows result_rows(const DistillationResult& r) {
  Rows rows{{"class", to_string(r.op)}};
  if (r.quantity == Quantity::fidelity) {
    rows.push_back({"m", std::to_string(r.m)});
    rows.push_back({"fidelity", num(r.value)});
  } else {
    if (r.quantity == Quantity::rate_eps) rows.push_back({"epsilon", num(r.epsilon)});
    rows.push_back({"k", std::to_string(r.k)});
    rows.push_back({"rate", rate_string(r.k)});
  }
  rows.push_back({"method", to_string(r.method)});
  if (r.lower_bound) rows.push_back({"bound", "lower bound only"});
  if (!r.note.empty()) rows.push_back({"note", r.note});
  return rows;
}

SchmidtInput read_schmidt(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    for (char& c : text)
      if (c == '\n' || c == '\r') c = ',';
    return parse_schmidt_csv(text);
  }
  return parse_schmidt_csv(arg);
}

RandomKind parse_kind(const std::string& k) {
  if (k == "haar" || k == "haar_pure" || k == "pure") return RandomKind::haar_pure;
  if (k == "ginibre" || k == "ginibre_mixed" || k == "mixed") return RandomKind::ginibre_mixed;
  if (k == "isotropic") return RandomKind::isotropic;
  if (k == "maxcorr" || k == "max_correlated") return RandomKind::max_correlated;
  throw InputError("unknown random kind '" + k + "' (expected haar|ginibre|isotropic|maxcorr)");
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"qedist: one-shot entanglement distillation under PPT-type and separability-preserving operations"};
  app.require_subcommand(1);
  std::string json_path;
  app.add_option("--json", json_path, "write machine-readable results to this file")->option_text("FILE");

  std::string cls = "ppt", state_path, set_name, measure, schmidt, kind = "haar", out_path, suite;
  int m = 2, d = 0, d_a = 2, d_b = 2, jobs = 1;
  double eps = 0.0, mreal = 1.0;
  std::uint64_t seed = 1;
  std::optional<double> f;
  std::optional<int> rank;
  bool exact = false;

  auto add_class = [&](CLI::App* c) {
    c->add_option("--class", cls, "ppt|ppt-pres|pptplus-pres|rains-pres|sepp|1locc-pure")->required();
  };
  auto add_state = [&](CLI::App* c) {
    c->add_option("--state", state_path, "state JSON file")->required()->check(CLI::ExistingFile);
  };

  CLI::App* c_fid = app.add_subcommand("fidelity", "fidelity of distillation F(rho, m)");
  add_class(c_fid);
  c_fid->add_option("--m", m, "target size")->required();
  add_state(c_fid);
  c_fid->add_flag("--exact", exact, "refuse bounds (SEPP on general states fails)");

  CLI::App* c_rate = app.add_subcommand("rate", "one-shot epsilon-error rate");
  add_class(c_rate);
  c_rate->add_option("--eps", eps, "error tolerance in [0,1)")->required();
  add_state(c_rate);
  c_rate->add_flag("--exact", exact, "refuse bounds");

  CLI::App* c_rate0 = app.add_subcommand("rate0", "one-shot zero-error rate");
  add_class(c_rate0);
  add_state(c_rate0);

  CLI::App* c_norm = app.add_subcommand("norm", "m-distillation norm of a Schmidt vector");
  c_norm->add_option("--m", m, "m")->required();
  c_norm->add_option("--schmidt", schmidt, "squared Schmidt coefficients, comma separated, or a CSV file")->required();

  CLI::App* c_mon = app.add_subcommand("monotone", "entanglement monotones");
  c_mon->add_option("--measure", measure, "tm|gm|robustness|negativity|mtd")->required();
  c_mon->add_option("--set", set_name, "ppt|pptplus|pptprime|rains|incoherent|sep");
  c_mon->add_option("--m", mreal, "parameter m for tm and gm");
  add_state(c_mon);

  CLI::App* c_dh = app.add_subcommand("dh", "hypothesis-testing divergence minimized over a set");
  c_dh->add_option("--eps", eps, "error tolerance in [0,1)")->required();
  c_dh->add_option("--set", set_name, "ppt|pptplus|pptprime|rains|incoherent")->required();
  add_state(c_dh);

  CLI::App* c_rand = app.add_subcommand("random", "write a seeded random state");
  c_rand->add_option("--kind", kind, "haar|ginibre|isotropic|maxcorr")->required();
  c_rand->add_option("--seed", seed, "seed")->required();
  c_rand->add_option("--out", out_path, "output state file")->required();
  c_rand->add_option("--d", d, "local dimension for both parties");
  c_rand->add_option("--d-a", d_a, "dimension of A");
  c_rand->add_option("--d-b", d_b, "dimension of B");
  c_rand->add_option("--f", f, "isotropic parameter");
  c_rand->add_option("--rank", rank, "rank for ginibre and maxcorr");

  CLI::App* c_rep = app.add_subcommand("reproduce", "run a verification suite");
  c_rep->add_option("--suite", suite, "pure|isotropic|maxcorr|appendix|hierarchy|zero_error")->required();
  c_rep->add_option("--d", d, "dimension (suite default if omitted)");
  c_rep->add_option("--seed", seed, "seed");
  c_rep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  for (CLI::App* c : {c_fid, c_rate, c_rate0, c_norm, c_mon, c_dh, c_rand, c_rep})
    c->add_option("--json", json_path, "write machine-readable results to this file")->option_text("FILE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  auto emit = [&](const Rows& rows, const json& j) {
    print_table(out, rows);
    if (!json_path.empty()) write_json_file(json_path, j);
  };

  try {
    if (c_fid->parsed()) {
      const DistillationResult r = fidelity(load_state(state_path), parse_operation_class(cls), m, !exact);
      emit(result_rows(r), to_json(r));
    } else if (c_rate->parsed()) {
      const DistillationResult r = rate_eps(load_state(state_path), parse_operation_class(cls), eps, !exact);
      emit(result_rows(r), to_json(r));
    } else if (c_rate0->parsed()) {
      const DensityOperator rho = load_state(state_path);
      const OperationClass o = parse_operation_class(cls);
      const DistillationResult r = rate_zero_error(rho, o);
      Rows rows = result_rows(r);
      const int rk = support_rank(rho);
      rows.insert(rows.begin() + 1, {"support rank", std::to_string(rk) + " of " + std::to_string(rho.dim())});
      json j = to_json(r);
      j["support_rank"] = rk;
      if (o == OperationClass::RAINS_PRESERVING) {
        const double a = asymptotic_zero_error_rains(rho);
        rows.push_back({"asymptotic bound", num(a) + " bits"});
        j["asymptotic_zero_error_bits"] = a;
      }
      emit(rows, j);
    } else if (c_norm->parsed()) {
      const SchmidtInput in = read_schmidt(schmidt);
      for (const auto& w : in.warnings) err << "warning: " << w << '\n';
      const MNormResult r = m_distillation_norm(in.xi, m);
      json j = to_json(r);
      j["m"] = m;
      j["fidelity"] = r.value * r.value / m;
      emit({{"m", std::to_string(m)},
            {"norm", num(r.value)},
            {"k*", std::to_string(r.k_star)},
            {"fidelity |xi|^2/m", num(r.value * r.value / m)}},
           j);
    } else if (c_mon->parsed()) {
      const DensityOperator rho = load_state(state_path);
      const MeasureKind k = parse_measure(measure);
      if (k != MeasureKind::negativity && set_name.empty()) throw InputError("--set is required for " + measure);
      const SetTag s = set_name.empty() ? SetTag::PPT : parse_set_tag(set_name);
      MonotoneValue v;
      switch (k) {
        case MeasureKind::t_m: v = t_m_detailed(rho, s, mreal); break;
        case MeasureKind::g_m: v = g_m_detailed(rho, s, mreal); break;
        case MeasureKind::robustness: v = robustness_dual(rho, s); break;
        case MeasureKind::negativity: v.value = negativity(rho); v.method = "closed_form"; break;
        case MeasureKind::mod_trace_distance: v.value = mod_trace_distance(rho, s); v.method = "sdp"; break;
      }
      Rows rows{{"measure", to_string(k)}};
      if (k != MeasureKind::negativity) rows.push_back({"set", to_string(s)});
      if (k == MeasureKind::t_m || k == MeasureKind::g_m) rows.push_back({"m", num(mreal)});
      rows.push_back({"value", num(v.value)});
      rows.push_back({"method", v.method});
      json j = to_json(v);
      j["measure"] = to_string(k);
      emit(rows, j);
    } else if (c_dh->parsed()) {
      const DhSetResult r = d_h_min_over_set_detailed(load_state(state_path), parse_set_tag(set_name), eps);
      const long k = std::isinf(r.bits) ? 0 : floor_reciprocal(std::exp2(-r.bits));
      json j = {{"bits", std::isinf(r.bits) ? json(nullptr) : json(r.bits)},
                {"gauge", r.gauge},
                {"epsilon", eps},
                {"set", set_name},
                {"test", state_to_json(r.test)},
                {"minimizer", state_to_json(r.minimizer)}};
      emit({{"set", to_string(parse_set_tag(set_name))},
            {"epsilon", num(eps)},
            {"D_H (bits)", num(r.bits)},
            {"gauge", num(r.gauge)},
            {"floor rate", k > 0 ? rate_string(k) : "-"}},
           j);
    } else if (c_rand->parsed()) {
      if (d > 0) d_a = d_b = d;
      const DensityOperator rho = random_state({parse_kind(kind), d_a, d_b, seed, f, rank});
      save_state(out_path, rho);
      json j = {{"out", out_path}, {"kind", kind}, {"seed", seed}, {"d_a", d_a}, {"d_b", d_b}};
      emit({{"wrote", out_path}, {"kind", kind}, {"dims", std::to_string(d_a) + "x" + std::to_string(d_b)}}, j);
    } else if (c_rep->parsed()) {
      const ReproReport r = run_repro_suite(parse_suite(suite), d, seed, jobs);
      std::size_t passed = 0;
      for (const ReproCase& c : r.cases) {
        passed += c.pass;
        out << (c.pass ? "PASS  " : "FAIL  ") << c.description;
        if (!c.error.empty()) {
          out << "  [" << c.error << "]";
        } else {
          out << "  expected " << num(c.expected) << " computed " << num(c.computed);
        }
        out << '\n';
      }
      out << "suite " << to_string(r.suite) << " d=" << r.d << " seed=" << r.seed << ": " << passed << "/"
          << r.cases.size() << " passed\n";
      if (!json_path.empty()) write_json_file(json_path, to_json(r));
      return r.passed() ? kExitOk : kExitSuiteFailure;
    }
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "computation error: " << e.what() << '\n';
    return kExitComputation;
  }
  return kExitOk;
}

}  // namespace qedist
