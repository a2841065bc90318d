#include "diagpc/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "diagpc/analytic.hpp"
#include "diagpc/errors.hpp"
#include "diagpc/lattice.hpp"
#include "diagpc/paircorr.hpp"
#include "diagpc/reductions.hpp"
#include "diagpc/volume.hpp"
#include "diagpc/zeta.hpp"

namespace diagpc {

using nlohmann::json;

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

double rounded(double v) { return std::stod(format_number(v)); }

const char* mode_name(const SampleMode& m) {
  return m.kind == SampleMode::Kind::quadratic ? "quadratic" : "power";
}

std::string format_name(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::json: return "json";
    case ReportFormat::plots: return "plots";
  }
  return "csv";
}

/// FNV-1a, stable across platforms.
std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  if (name == "plots") return ReportFormat::plots;
  throw ConfigError("unknown format '" + name + "' (csv, json, plots)");
}

SampleMode parse_mode(const std::string& mode, int k) {
  if (mode == "quadratic") {
    if (k != 2) throw ConfigError("quadratic mode has k = 2");
    return SampleMode::quadratic();
  }
  if (mode == "power") {
    if (k < 3) throw ConfigError("power mode needs k >= 3");
    return SampleMode::power(k);
  }
  if (mode.rfind("power-", 0) == 0) {
    try {
      return parse_mode("power", std::stoi(mode.substr(6)));
    } catch (const std::logic_error&) {
      throw ConfigError("bad mode '" + mode + "'");
    }
  }
  throw ConfigError("unknown mode '" + mode + "' (quadratic, power)");
}

Window window_for(const ExperimentConfig& config, double T) {
  if (config.a && config.b) return Window(*config.a, *config.b);
  const bool quad = config.mode.kind == SampleMode::Kind::quadratic;
  const double center = quad ? 0.0 : 0.5;
  if (config.rho) return Window::centered(center, std::pow(T, -*config.rho));
  return quad ? Window(-0.5, 0.5) : Window(0.25, 0.75);
}

void ExperimentConfig::validate() const {
  if (T.empty()) throw ConfigError("no threshold T given");
  for (double t : T) {
    if (!(t > 0) || !std::isfinite(t)) throw ConfigError("T must be positive and finite");
  }
  if (a.has_value() != b.has_value()) throw ConfigError("give both a and b, or neither");
  if (a && !(*a < *b)) throw ConfigError("window needs a < b");
  if (a && rho) throw ConfigError("give either a window (a, b) or rho, not both");
  if (rho && !(*rho > 0 && *rho < 1)) throw ConfigError("rho must lie in (0, 1)");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (mode.kind == SampleMode::Kind::power && mode.k < 3) throw ConfigError("power mode needs k >= 3");
  if (mode.kind == SampleMode::Kind::quadratic && with_constant && mc_samples < 1'000'000) {
    throw ConfigError("quadratic constants need mc-samples >= 1e6");
  }
  if (with_constant && mc_samples < 1) throw ConfigError("mc-samples must be >= 1");
  if (budget_seconds && !(*budget_seconds > 0)) throw ConfigError("budget-seconds must be positive");
  for (double t : T) {
    const auto w = window_for(*this, t);
    if (mode.kind == SampleMode::Kind::power && !(w.a() > 0)) {
      std::ostringstream msg;
      msg << "power mode needs 0 < a < b, got [" << w.a() << ", " << w.b() << ")";
      throw ConfigError(msg.str());
    }
  }
  (void)experiment_forms(*this);
}

std::vector<Form> experiment_forms(const ExperimentConfig& config) {
  if (config.coeffs) {
    const auto& c = *config.coeffs;
    if (config.mode.kind == SampleMode::Kind::quadratic) {
      if (c.size() != 2) throw ConfigError("quadratic coeffs are alpha, beta");
      return {QuadraticForm(c[0], c[1])};
    }
    if (c.size() != static_cast<std::size_t>(config.mode.k - 1)) {
      throw ConfigError("power coeffs are alpha_2 .. alpha_k");
    }
    return {PowerForm(config.mode.k, c)};
  }
  return sample_parameters(config.seed, config.samples, config.mode).forms;
}

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  ExperimentConfig c;
  std::string mode = "quadratic";
  int k = 2;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "mode") mode = v.get<std::string>();
      else if (key == "k") k = v.get<int>();
      else if (key == "T") c.T = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
      else if (key == "a") c.a = v.get<double>();
      else if (key == "b") c.b = v.get<double>();
      else if (key == "rho") c.rho = v.get<double>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "samples") c.samples = v.get<std::size_t>();
      else if (key == "coeffs") c.coeffs = v.get<std::vector<double>>();
      else if (key == "threads") c.threads = v.get<int>();
      else if (key == "include-zero") c.include_zero = v.get<bool>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = parse_format(v.get<std::string>());
      else if (key == "mc-samples") c.mc_samples = v.get<std::uint64_t>();
      else if (key == "constant") c.with_constant = v.get<bool>();
      else if (key == "budget-seconds") c.budget_seconds = v.get<double>();
      else if (key == "memory-cap") c.memory_cap = v.get<std::uint64_t>();
      else if (key == "cache-dir") c.cache_dir = v.get<std::string>();
      else if (key == "timing") c.timing = v.get<bool>();
      else if (key == "diagnostics-analytic") c.diagnostics_analytic = v.get<bool>();
      else if (key == "diagnostics-reductions") c.diagnostics_reductions = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  if (mode != "quadratic" && k == 2) k = 3;
  c.mode = parse_mode(mode, mode == "quadratic" ? 2 : k);
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["mode"] = mode_name(c.mode);
  j["k"] = c.mode.k;
  j["T"] = c.T;
  if (c.a) j["a"] = *c.a;
  if (c.b) j["b"] = *c.b;
  if (c.rho) j["rho"] = *c.rho;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  if (c.coeffs) j["coeffs"] = *c.coeffs;
  j["threads"] = c.threads;
  j["include-zero"] = c.include_zero;
  j["out"] = c.out;
  j["format"] = format_name(c.format);
  j["mc-samples"] = c.mc_samples;
  j["constant"] = c.with_constant;
  if (c.budget_seconds) j["budget-seconds"] = *c.budget_seconds;
  j["memory-cap"] = c.memory_cap;
  j["cache-dir"] = c.cache_dir;
  j["timing"] = c.timing;
  j["diagnostics-analytic"] = c.diagnostics_analytic;
  j["diagnostics-reductions"] = c.diagnostics_reductions;
  return j.dump(2);
}

double estimate_run_seconds(const Form& form, double T) {
  // enumeration with sort, then three linear pair counts
  const double n = std::max(1.0, estimate_point_count(form, T));
  return n * (std::log2(n) * 3e-9 + 4e-8);
}

namespace {

ValueList enumerate_cached(const Form& form, double T, const ExperimentConfig& config) {
  EnumerationOptions opts;
  opts.include_zero = config.include_zero;
  opts.memory_cap = config.memory_cap;
  opts.threads = config.threads;
  if (config.cache_dir.empty()) return enumerate_values(form, T, opts);
  std::ostringstream key;
  key << describe(form) << '|' << format_number(T) << '|' << config.include_zero;
  char name[40];
  std::snprintf(name, sizeof name, "vals_%016llx.bin",
                static_cast<unsigned long long>(fnv1a(key.str())));
  const auto path = std::filesystem::path(config.cache_dir) / name;
  if (std::filesystem::exists(path)) {
    return ValueList(load_value_dump(path.string()), T, config.include_zero);
  }
  auto values = enumerate_values(form, T, opts);
  std::filesystem::create_directories(config.cache_dir);
  save_value_dump(path.string(), values.values());
  return values;
}

void analytic_diagnostics(ExperimentReport& report) {
  double max_diff = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = i;
    max_diff = std::max(max_diff, std::abs(zeta_half_line(t) - zeta_half_line_eta(t)));
  }
  report.diagnostics.emplace_back("zeta_two_method_max_diff", max_diff);
  const std::vector<double> ts{100.0, 200.0, 400.0, 800.0};
  const auto moments = zeta_fourth_moment_sweep(ts);
  for (const auto& m : moments) {
    report.diagnostics.emplace_back("zeta_fourth_moment@" + format_number(m.t_star), m.integral);
  }
  report.diagnostics.emplace_back("zeta_fourth_moment_exponent", moments.back().fit_exponent);
}

void reductions_diagnostics(ExperimentReport& report, const ExperimentConfig& config,
                            const std::vector<Form>& forms) {
  const Form& form = forms.front();
  for (double T : config.T) {
    const auto tag = "@" + format_number(T);
    if (const auto* p = std::get_if<PowerForm>(&form)) {
      const auto e = excluded_regime_sum(*p, T, 0.05);
      report.diagnostics.emplace_back("excluded_regime_main" + tag, e.main);
      report.diagnostics.emplace_back("excluded_regime_diagonal" + tag, e.diagonal);
    } else {
      EnumerationOptions opts;
      opts.include_zero = config.include_zero;
      opts.memory_cap = config.memory_cap;
      opts.threads = config.threads;
      const auto nd = near_diagonal_count(form, T, window_for(config, T), 0.4, opts);
      report.diagnostics.emplace_back("near_diagonal_fraction" + tag, nd.fraction);
    }
  }
}

}  // namespace

ExperimentReport run(const ExperimentConfig& config) {
  config.validate();
  const auto forms = experiment_forms(config);
  for (const auto& form : forms) {
    for (double T : config.T) {
      if (estimate_point_count(form, T) > static_cast<double>(config.memory_cap)) {
        std::ostringstream msg;
        msg << "T = " << T << " needs about " << estimate_point_count(form, T)
            << " values, above the memory cap " << config.memory_cap;
        throw CapacityError(msg.str());
      }
      if (config.budget_seconds && estimate_run_seconds(form, T) > *config.budget_seconds) {
        std::ostringstream msg;
        msg << "T = " << T << " is estimated at " << estimate_run_seconds(form, T)
            << " s, above the budget of " << *config.budget_seconds << " s";
        throw CapacityError(msg.str());
      }
    }
  }

  ExperimentReport report;
  report.seed = config.seed;
  report.threads = config.threads;
  MonteCarloOptions mc;
  mc.samples = config.mc_samples;
  mc.seed = config.seed;
  mc.threads = config.threads;

  for (const auto& form : forms) {
    std::optional<double> constant;
    std::string constant_error, constant_kind;
    if (config.with_constant) {
      try {
        constant = gated_pair_constant(form, mc).value;
      } catch (const NumericalAuditError& e) {
        constant_error = e.what();
        constant_kind = "audit";
      }
    }
    for (double T : config.T) {
      const auto start = std::chrono::steady_clock::now();
      const auto window = window_for(config, T);
      RunRecord rec;
      rec.mode = mode_name(config.mode);
      rec.k = degree(form);
      rec.coeffs = coefficients(form);
      rec.coeffs.erase(rec.coeffs.begin());
      rec.T = T;
      rec.a = window.a();
      rec.b = window.b();
      rec.seed = config.seed;
      rec.error = constant_error;
      rec.error_kind = constant_kind;
      try {
        const auto values = enumerate_cached(form, T, config);
        const auto est = estimate_from_values(form, values, window, constant, config.threads);
        rec.N = est.N;
        rec.count = est.count;
        rec.count_inner = est.count_inner;
        rec.count_outer = est.count_outer;
        rec.R = est.R;
        rec.c = est.constant;
        rec.prediction = est.prediction;
        rec.ratio = est.ratio;
      } catch (const CapacityError& e) {
        rec.error = e.what();
        rec.error_kind = "capacity";
      } catch (const NumericalAuditError& e) {
        rec.error = e.what();
        rec.error_kind = "audit";
      } catch (const DomainError& e) {
        rec.error = e.what();
        rec.error_kind = "domain";
      }
      if (config.timing) {
        rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                     .count();
      }
      report.records.push_back(std::move(rec));
    }
  }

  std::vector<double> trend_t, trend_dev;
  for (double T : config.T) {
    TAggregate agg;
    agg.T = T;
    std::vector<double> ratios, devs;
    for (const auto& r : report.records) {
      if (r.T != T) continue;
      ++agg.runs;
      if (r.ratio) {
        ratios.push_back(rounded(*r.ratio));
        devs.push_back(std::abs(rounded(*r.ratio) - 1.0));
      }
    }
    if (!ratios.empty()) {
      agg.median_ratio = median(ratios);
      agg.median_abs_deviation = median(devs);
      if (*agg.median_abs_deviation > 0) {
        trend_t.push_back(T);
        trend_dev.push_back(*agg.median_abs_deviation);
      }
    }
    report.aggregates.push_back(agg);
  }
  if (trend_t.size() >= 2) report.trend_slope = log_log_slope(trend_t, trend_dev);

  if (config.diagnostics_analytic) analytic_diagnostics(report);
  if (config.diagnostics_reductions) reductions_diagnostics(report, config, forms);
  return report;
}

std::string csv_header(const ExperimentReport&, const ExperimentConfig& config) {
  std::ostringstream h;
  h << "mode,k,";
  if (config.mode.kind == SampleMode::Kind::quadratic) {
    h << "alpha,beta,";
  } else {
    for (int i = 2; i <= config.mode.k; ++i) h << "alpha" << i << ",";
  }
  h << "T,a,b,N,count,count_inner,count_outer,R,c,prediction,ratio,seed,ms";
  return h.str();
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

void emit_csv(const ExperimentReport& report, const ExperimentConfig& config, std::ostream& out) {
  out << csv_header(report, config) << '\n';
  for (const auto& r : report.records) {
    // audit failures of the constant leave the counts intact
    const bool counted = r.error_kind.empty() || r.error_kind == "audit";
    out << r.mode << ',' << r.k << ',';
    for (double c : r.coeffs) out << format_number(c) << ',';
    out << format_number(r.T) << ',' << format_number(r.a) << ',' << format_number(r.b) << ',';
    if (counted) {
      out << r.N << ',' << r.count << ',' << r.count_inner << ',' << r.count_outer << ','
          << format_number(r.R) << ',';
    } else {
      out << ",,,,,";
    }
    out << opt(r.c) << ',' << opt(r.prediction) << ',' << opt(r.ratio) << ',' << r.seed << ','
        << opt(r.ms) << '\n';
  }
  if (!out) throw Error("CSV write failed");
}

void emit_json(const ExperimentReport& report, const ExperimentConfig& config, std::ostream& out) {
  auto num = [](const std::optional<double>& v) -> json {
    return v ? json(rounded(*v)) : json(nullptr);
  };
  json j;
  j["environment"] = {{"seed", report.seed}, {"threads", report.threads}, {"version", report.version}};
  j["config"] = json::parse(config_to_json(config));
  j["records"] = json::array();
  for (const auto& r : report.records) {
    json rec;
    rec["mode"] = r.mode;
    rec["k"] = r.k;
    json cs = json::array();
    for (double c : r.coeffs) cs.push_back(rounded(c));
    rec["coeffs"] = cs;
    rec["T"] = rounded(r.T);
    rec["a"] = rounded(r.a);
    rec["b"] = rounded(r.b);
    rec["N"] = r.N;
    rec["count"] = r.count;
    rec["count_inner"] = r.count_inner;
    rec["count_outer"] = r.count_outer;
    rec["R"] = rounded(r.R);
    rec["c"] = num(r.c);
    rec["prediction"] = num(r.prediction);
    rec["ratio"] = num(r.ratio);
    rec["seed"] = r.seed;
    rec["ms"] = num(r.ms);
    if (!r.error.empty()) {
      rec["error"] = r.error;
      rec["error_kind"] = r.error_kind;
    }
    j["records"].push_back(rec);
  }
  j["aggregates"] = json::array();
  for (const auto& a : report.aggregates) {
    j["aggregates"].push_back({{"T", rounded(a.T)},
                               {"runs", a.runs},
                               {"median_ratio", num(a.median_ratio)},
                               {"median_abs_deviation", num(a.median_abs_deviation)}});
  }
  j["trend_slope"] = num(report.trend_slope);
  json diag = json::object();
  for (const auto& [k, v] : report.diagnostics) diag[k] = rounded(v);
  j["diagnostics"] = diag;
  out << j.dump(2) << '\n';
  if (!out) throw Error("JSON write failed");
}

void emit_plot_script(const std::string& csv_path, std::ostream& out) {
  out << "import csv\n"
         "import matplotlib\n"
         "matplotlib.use(\"Agg\")\n"
         "import matplotlib.pyplot as plt\n\n"
         "rows = list(csv.DictReader(open(" << json(csv_path).dump() << ")))\n"
         "pts = [(float(r[\"T\"]), float(r[\"ratio\"])) for r in rows if r[\"ratio\"]]\n"
         "fig, ax = plt.subplots()\n"
         "ax.semilogx([p[0] for p in pts], [p[1] for p in pts], \"o\")\n"
         "ax.axhline(1.0, color=\"gray\", lw=0.8)\n"
         "ax.set_xlabel(\"T\")\n"
         "ax.set_ylabel(\"R / prediction\")\n"
         "fig.savefig(" << json(csv_path + ".png").dump() << ", dpi=120)\n";
}

void emit(const ExperimentReport& report, const ExperimentConfig& config) {
  auto open = [](const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    return f;
  };
  switch (config.format) {
    case ReportFormat::csv:
      if (config.out.empty()) {
        emit_csv(report, config, std::cout);
      } else {
        auto f = open(config.out);
        emit_csv(report, config, f);
      }
      break;
    case ReportFormat::json:
      if (config.out.empty()) {
        emit_json(report, config, std::cout);
      } else {
        auto f = open(config.out);
        emit_json(report, config, f);
      }
      break;
    case ReportFormat::plots: {
      if (config.out.empty()) throw ConfigError("plots format needs --out");
      auto f = open(config.out);
      emit_csv(report, config, f);
      auto s = open(config.out + ".py");
      emit_plot_script(config.out, s);
      break;
    }
  }
}

}  // namespace diagpc
