// diagpc: pair-correlation experiments for diagonal forms.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"
#include "diagpc/lattice.hpp"
#include "diagpc/paircorr.hpp"
#include "diagpc/reductions.hpp"
#include "diagpc/runner.hpp"
#include "diagpc/volume.hpp"
#include "diagpc/zeta.hpp"

using namespace diagpc;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kCapacity = 3, kAudit = 4 };

struct Flags {
  std::string config;
  std::string mode;
  int k = 0;
  std::vector<double> T;
  double a = 0, b = 0, rho = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<double> coeffs;
  int threads = 1;
  bool include_zero = false;
  std::string out, format;
  std::uint64_t mc_samples = 0;
  double budget_seconds = 0;
  std::string cache_dir;
  bool timing = false;
  bool no_constant = false;
  std::vector<std::string> diagnostics;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "flat JSON config; flags override its keys");
  app->add_option("--mode", f.mode, "quadratic | power (or power-K)");
  app->add_option("--k", f.k, "degree for power mode");
  app->add_option("--T", f.T, "threshold(s)")->delimiter(',');
  app->add_option("--a", f.a, "window start");
  app->add_option("--b", f.b, "window end");
  app->add_option("--rho", f.rho, "window width T^-rho around the default center");
  app->add_option("--seed", f.seed, "parameter and Monte Carlo seed");
  app->add_option("--samples", f.samples, "number of sampled forms");
  app->add_option("--coeffs", f.coeffs, "fixed coefficients instead of sampling")->delimiter(',');
  app->add_option("--threads", f.threads, "worker threads");
  app->add_flag("--include-zero", f.include_zero, "allow zero coordinates");
  app->add_option("--out", f.out, "output path (stdout when absent)");
  app->add_option("--format", f.format, "csv | json | plots");
  app->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples per constant");
  app->add_option("--budget-seconds", f.budget_seconds, "abort runs estimated above this");
  app->add_option("--cache-dir", f.cache_dir, "ValueList cache directory");
  app->add_flag("--timing", f.timing, "fill the ms column");
  app->add_flag("--no-constant", f.no_constant, "skip the Poisson constant (ratio left empty)");
  app->add_option("--diagnostics", f.diagnostics, "analytic and/or reductions")->delimiter(',');
}

ExperimentConfig build_config(CLI::App* app, const Flags& f, bool needs_T = true) {
  json j = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("cannot read config '" + f.config + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      j = json::parse(ss.str());
    } catch (const json::exception& e) {
      throw ConfigError("config '" + f.config + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  }
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (given("--mode")) j["mode"] = f.mode;
  if (given("--k")) j["k"] = f.k;
  if (given("--T")) j["T"] = f.T;
  if (given("--a")) j["a"] = f.a;
  if (given("--b")) j["b"] = f.b;
  if (given("--rho")) j["rho"] = f.rho;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--samples")) j["samples"] = f.samples;
  if (given("--coeffs")) j["coeffs"] = f.coeffs;
  if (given("--threads")) j["threads"] = f.threads;
  if (given("--include-zero")) j["include-zero"] = f.include_zero;
  if (given("--out")) j["out"] = f.out;
  if (given("--format")) j["format"] = f.format;
  if (given("--mc-samples")) j["mc-samples"] = f.mc_samples;
  if (given("--budget-seconds")) j["budget-seconds"] = f.budget_seconds;
  if (given("--cache-dir")) j["cache-dir"] = f.cache_dir;
  if (given("--timing")) j["timing"] = f.timing;
  if (given("--no-constant")) j["constant"] = !f.no_constant;
  for (const auto& d : f.diagnostics) {
    if (d == "analytic") j["diagnostics-analytic"] = true;
    else if (d == "reductions") j["diagnostics-reductions"] = true;
    else throw ConfigError("unknown diagnostics tier '" + d + "'");
  }
  if (!j.contains("k") && j.contains("mode") && j["mode"] == "power") j["k"] = 3;
  // constants do not depend on T
  if (!needs_T && !j.contains("T")) j["T"] = 1.0;
  auto config = config_from_json(j.dump());
  config.validate();
  return config;
}

/// Text sink honoring --out.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string coeff_list(const Form& form) {
  auto c = coefficients(form);
  std::string s;
  for (std::size_t i = 1; i < c.size(); ++i) s += (i > 1 ? "," : "") + format_number(c[i]);
  return s;
}

int report_exit_code(const ExperimentReport& report) {
  int code = kOk;
  for (const auto& r : report.records) {
    if (r.error_kind == "audit") code = std::max(code, static_cast<int>(kAudit));
    if (r.error_kind == "capacity" && code == kOk) code = kCapacity;
    if (!r.error.empty()) std::cerr << "run T=" << r.T << ": " << r.error << '\n';
  }
  return code;
}

int cmd_run(CLI::App* app, const Flags& f) {
  const auto config = build_config(app, f);
  const auto report = run(config);
  emit(report, config);
  return report_exit_code(report);
}

int cmd_enumerate(CLI::App* app, const Flags& f, const std::string& dump) {
  auto config = build_config(app, f);
  const auto forms = experiment_forms(config);
  Sink sink(config.out);
  auto& out = sink.stream();
  out << "mode,k,coeffs,T,N,predicted,ratio\n";
  EnumerationOptions opts;
  opts.include_zero = config.include_zero;
  opts.threads = config.threads;
  opts.memory_cap = config.memory_cap;
  bool dumped = false;
  for (const auto& form : forms) {
    for (double T : config.T) {
      if (!dump.empty() && !dumped) {
        const auto values = enumerate_values(form, T, opts);
        save_value_dump(dump, values.values());
        dumped = true;
      }
      const auto pc = count_points(form, T, opts, unit_volume_closed_form(form));
      out << (is_quadratic(form) ? "quadratic" : "power") << ',' << degree(form) << ",\""
          << coeff_list(form) << "\"," << format_number(T) << ',' << pc.count << ','
          << format_number(pc.predicted) << ',' << format_number(pc.ratio) << '\n';
    }
  }
  return kOk;
}

int cmd_constant(CLI::App* app, const Flags& f) {
  auto config = build_config(app, f, false);
  MonteCarloOptions mc;
  mc.samples = config.mc_samples;
  mc.seed = config.seed;
  mc.threads = config.threads;
  json arr = json::array();
  for (const auto& form : experiment_forms(config)) {
    const auto vol = volume_unit(form, mc);
    const auto pc = gated_pair_constant(form, mc);
    json j;
    j["form"] = describe(form);
    j["unit_volume"] = vol.value;
    j["unit_volume_monte_carlo"] = *vol.monte_carlo;
    j["unit_volume_std_error"] = vol.std_error;
    j["pair_constant"] = pc.value;
    j["pair_constant_std_error"] = pc.std_error;
    j["method"] = to_string(pc.method);
    if (pc.monte_carlo) j["pair_constant_monte_carlo"] = *pc.monte_carlo;
    if (pc.closed_form) j["pair_constant_closed_form"] = *pc.closed_form;
    j["eps_schedule"] = pc.epsilon_schedule;
    j["per_eps"] = pc.per_epsilon;
    j["per_eps_std_error"] = pc.per_epsilon_stderr;
    j["flagged"] = pc.flagged;
    arr.push_back(j);
  }
  Sink sink(config.out);
  sink.stream() << arr.dump(2) << '\n';
  return kOk;
}

int cmd_dirichlet(const Flags& f, std::int64_t K, const std::vector<double>& ts,
                  const std::vector<int>& ells) {
  Sink sink(f.out);
  auto& out = sink.stream();
  if (!ells.empty()) {
    out << "K,ell,value,normalized\n";
    for (int ell : ells) {
      const auto r = dirichlet_fourth_moment_dyadic(K, ell);
      out << K << ',' << ell << ',' << format_number(r.value) << ',' << format_number(r.normalized)
          << '\n';
    }
    return kOk;
  }
  out << "K,t,re,im,abs\n";
  for (double t : ts) {
    const auto r = dirichlet_sum(1, K, t);
    out << K << ',' << format_number(t) << ',' << format_number(r.value.real()) << ','
        << format_number(r.value.imag()) << ',' << format_number(std::abs(r.value)) << '\n';
  }
  return kOk;
}

int cmd_zeta(const Flags& f, const std::vector<double>& t_stars, const std::vector<double>& ts) {
  Sink sink(f.out);
  auto& out = sink.stream();
  if (!ts.empty()) {
    out << "t,re,im\n";
    for (double t : ts) {
      const auto z = zeta_half_line(t);
      out << format_number(t) << ',' << format_number(z.real()) << ',' << format_number(z.imag())
          << '\n';
    }
    return kOk;
  }
  out << "t_star,integral,error_estimate,fit_exponent\n";
  for (const auto& r : zeta_fourth_moment_sweep(t_stars)) {
    out << format_number(r.t_star) << ',' << format_number(r.integral) << ','
        << format_number(r.error_estimate) << ',' << format_number(r.fit_exponent) << '\n';
  }
  return kOk;
}

int cmd_diagnostics(CLI::App* app, const Flags& f, double theta, double eps) {
  auto config = build_config(app, f);
  const auto forms = experiment_forms(config);
  json j;
  j["records"] = json::array();
  for (const auto& form : forms) {
    for (double T : config.T) {
      json r;
      r["form"] = describe(form);
      r["T"] = T;
      if (const auto* p = std::get_if<PowerForm>(&form)) {
        const double th = theta > 0 ? theta : 0.05;
        const auto e = excluded_regime_sum(*p, T, th);
        r["theta"] = th;
        r["excluded_main"] = e.main;
        r["excluded_diagonal"] = e.diagonal;
        r["excluded_all_pairs"] = e.all_pairs;
      } else {
        const double th = theta > 0 ? theta : 0.4;
        EnumerationOptions opts;
        opts.include_zero = config.include_zero;
        opts.threads = config.threads;
        opts.memory_cap = config.memory_cap;
        const auto nd = near_diagonal_count(form, T, window_for(config, T), th, opts);
        r["theta"] = th;
        r["near_diagonal"] = nd.near;
        r["window_pairs"] = nd.total;
        r["near_diagonal_fraction"] = nd.fraction;
      }
      try {
        const auto boxes = box_localize(form, T, eps, config.seed);
        const auto audit = separation_audit(boxes, T, eps);
        r["separation_passed"] = audit.passed;
        r["separation_corner_ratio"] = audit.corner_ratio;
        r["separation_failures"] = audit.failures;
      } catch (const ConfigError& e) {
        r["separation_skipped"] = e.what();
      }
      j["records"].push_back(r);
    }
  }
  Sink sink(config.out);
  sink.stream() << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pair correlation of values of diagonal forms"};
  app.require_subcommand(1);
  Flags flags;
  std::string dump;
  std::int64_t K = 1000;
  std::vector<double> ts;
  std::vector<int> ells;
  std::vector<double> t_stars{100, 200, 400, 800};
  double theta = 0, eps = 0.05;

  auto* enumerate = app.add_subcommand("enumerate", "enumerate form values and count points");
  auto* paircorr = app.add_subcommand("paircorr", "pair correlation ratio for one configuration");
  auto* constant = app.add_subcommand("constant", "gated volume and pair constants");
  auto* dirichlet = app.add_subcommand("dirichlet", "Dirichlet sums and dyadic fourth moments");
  auto* zeta = app.add_subcommand("zeta-moment", "zeta on the critical line and its fourth moment");
  auto* diagnostics = app.add_subcommand("diagnostics", "near-diagonal, excluded-regime and box audits");
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over T and sampled forms");
  for (auto* sub : {enumerate, paircorr, constant, diagnostics, sweep}) add_common(sub, flags);
  enumerate->add_option("--dump", dump, "write the first value list as a binary dump");
  for (auto* sub : {dirichlet, zeta}) sub->add_option("--out", flags.out, "output path");
  dirichlet->add_option("--K", K, "terms k = 1..K");
  dirichlet->add_option("--t", ts, "frequencies")->delimiter(',');
  dirichlet->add_option("--ell", ells, "dyadic moment levels")->delimiter(',');
  zeta->add_option("--t-star", t_stars, "upper limits of the fourth moment")->delimiter(',');
  zeta->add_option("--t", ts, "evaluate zeta(1/2 + it) instead")->delimiter(',');
  diagnostics->add_option("--theta", theta, "near-diagonal / excluded-regime exponent");
  diagnostics->add_option("--eps", eps, "box localization exponent");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*enumerate) return cmd_enumerate(enumerate, flags, dump);
    if (*paircorr) return cmd_run(paircorr, flags);
    if (*sweep) return cmd_run(sweep, flags);
    if (*constant) return cmd_constant(constant, flags);
    if (*dirichlet) {
      if (ts.empty() && ells.empty()) ts = {0.0};
      return cmd_dirichlet(flags, K, ts, ells);
    }
    if (*zeta) return cmd_zeta(flags, t_stars, ts);
    if (*diagnostics) return cmd_diagnostics(diagnostics, flags, theta, eps);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const NumericalAuditError& e) {
    std::cerr << "numerical audit failure: " << e.what() << '\n';
    return kAudit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
