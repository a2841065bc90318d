#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diagpc/errors.hpp"
#include "diagpc/runner.hpp"

using namespace diagpc;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(DIAGPC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "diagpc_runner_test";
  fs::create_directories(dir);
  return dir / name;
}

ExperimentConfig small_config() {
  auto c = config_from_json(R"({"mode": "quadratic", "T": [500, 2000], "seed": 3, "constant": false})");
  c.validate();
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = config_from_json(
      R"({"mode": "power", "k": 4, "T": 1e5, "seed": 9, "samples": 2, "mc-samples": 5000, "include-zero": true})");
  CHECK(c.mode.kind == SampleMode::Kind::power);
  CHECK(c.mode.k == 4);
  CHECK(c.T == std::vector<double>{1e5});
  CHECK(c.seed == 9);
  CHECK(c.samples == 2);
  CHECK(c.mc_samples == 5000);
  CHECK(c.include_zero);
  CHECK_THROWS_AS(config_from_json(R"({"mode": "quadratic", "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"T": "many"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);

  const auto back = config_from_json(config_to_json(c));
  CHECK(back.mode.k == 4);
  CHECK(back.T == c.T);
  CHECK(back.mc_samples == c.mc_samples);
}

TEST_CASE("config validation") {
  auto c = config_from_json(R"({"mode": "power", "T": [1000], "a": -1, "b": 1})");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_from_json(R"({"T": [1000], "a": 1})");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_from_json(R"({"T": [1000], "mc-samples": 1000})");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_from_json(R"({"T": []})");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = config_from_json(R"({"T": [1000], "rho": 0.1})");
  CHECK_NOTHROW(c.validate());
  const auto w = window_for(c, 1000);
  CHECK(w.b() - w.a() == doctest::Approx(std::pow(1000.0, -0.1)));
  CHECK(w.xi() == doctest::Approx(0.0));
  CHECK(parse_format("json") == ReportFormat::json);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
}

TEST_CASE("CSV layout") {
  const auto c = small_config();
  ExperimentReport empty;
  std::ostringstream e;
  emit_csv(empty, c, e);
  CHECK(lines(e.str()).size() == 1);
  CHECK(lines(e.str())[0] ==
        "mode,k,alpha,beta,T,a,b,N,count,count_inner,count_outer,R,c,prediction,ratio,seed,ms");

  const auto report = run(c);
  std::ostringstream out;
  emit_csv(report, c, out);
  const auto ls = lines(out.str());
  REQUIRE(ls.size() == 3);
  for (const auto& l : ls) CHECK(fields(l).size() == 17);
  CHECK(fields(ls[1])[16].empty());
  CHECK(fields(ls[1])[14].empty());
  CHECK(format_number(0.1 + 0.2) == "0.3");
  CHECK(format_number(1e5) == "100000");
}

TEST_CASE("JSON and CSV carry the same numbers") {
  const auto c = small_config();
  const auto report = run(c);
  std::ostringstream cs, js;
  emit_csv(report, c, cs);
  emit_json(report, c, js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["environment"]["seed"] == 3);
  CHECK(j["environment"]["version"] == kVersion);
  const auto ls = lines(cs.str());
  REQUIRE(j["records"].size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto f = fields(ls[i + 1]);
    const auto& r = j["records"][i];
    CHECK(std::stod(f[4]) == doctest::Approx(r["T"].get<double>()).epsilon(1e-11));
    CHECK(std::stoll(f[8]) == r["count"].get<long long>());
    CHECK(std::stod(f[11]) == doctest::Approx(r["R"].get<double>()).epsilon(1e-11));
    CHECK(r["ratio"].is_null());
  }
}

TEST_CASE("results do not depend on the thread count") {
  auto c = small_config();
  c.samples = 2;
  std::ostringstream one, four;
  emit_csv(run(c), c, one);
  c.threads = 4;
  emit_csv(run(c), c, four);
  CHECK(one.str() == four.str());
}

TEST_CASE("budget and memory caps stop a sweep before it starts") {
  auto c = small_config();
  c.T = {1e9};
  c.budget_seconds = 1.0;
  CHECK_THROWS_AS(run(c), CapacityError);
  c.budget_seconds.reset();
  c.memory_cap = 1000;
  CHECK_THROWS_AS(run(c), CapacityError);
}

TEST_CASE("value cache round trip") {
  auto c = small_config();
  const auto dir = scratch("cache");
  fs::remove_all(dir);
  c.cache_dir = dir.string();
  std::ostringstream first, second;
  emit_csv(run(c), c, first);
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 2);
  emit_csv(run(c), c, second);
  CHECK(first.str() == second.str());
  fs::remove_all(dir);
}

TEST_CASE("command line") {
  const auto cfg = scratch("cfg.json");
  const auto out = scratch("out.csv");
  {
    std::ofstream f(cfg);
    f << R"({"mode": "quadratic", "T": [300], "seed": 5, "samples": 3, "constant": false})";
  }
  REQUIRE(cli("sweep --config " + cfg.string() + " --samples 1 --out " + out.string()) == 0);
  CHECK(lines(slurp(out)).size() == 2);
  CHECK(fields(lines(slurp(out))[1])[15] == "5");

  CHECK(cli("sweep --mode power --T 1000 --a -1 --b 1 --no-constant") == 2);
  CHECK(cli("sweep --config /nonexistent/cfg.json") == 2);
  CHECK(cli("sweep --T 1e12 --no-constant --budget-seconds 1") == 3);

  const auto plots = scratch("sweep.csv");
  REQUIRE(cli("sweep --T 300 --no-constant --format plots --out " + plots.string()) == 0);
  const fs::path script = plots.string() + ".py";
  CHECK(fs::exists(script));
  CHECK(slurp(script).find("matplotlib") != std::string::npos);
  fs::remove_all(cfg.parent_path());
}
