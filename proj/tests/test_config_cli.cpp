#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "trg/commands.hpp"
#include "trg/config.hpp"
#include "trg/error.hpp"
#include "trg/graph.hpp"

using namespace trg;
namespace fs = std::filesystem;

namespace {

const char* kBase = R"(
[model]
labels = A B
mu = 0.5 0.5
lambda = 1 1; 1 1
[target]
pi_scale = 1.5
[event]
kind = ball
radius = 0.05
[run]
n = 20 40
samples = 4000
seed = 11
graphs = 2
)";

std::string with_event(const std::string& event_section) {
  std::string s = kBase;
  const auto at = s.find("[event]");
  const auto end = s.find("[run]");
  return s.substr(0, at) + event_section + "\n" + s.substr(end);
}

std::string validation_message(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// key,value lines of the legendre report
std::map<std::string, std::string> report_of(const std::string& s) {
  std::map<std::string, std::string> kv;
  for (const auto& line : lines_of(s)) {
    const auto f = split(line, ',');
    if (f.size() == 2) kv.emplace(f[0], f[1]);
  }
  return kv;
}

fs::path scratch(const std::string& tag) {
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  auto p = fs::temp_directory_path() / ("trg_test_" + tag + "_" + std::to_string(stamp));
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

CommandOptions quiet() {
  CommandOptions o;
  o.omit_runtime = true;
  return o;
}

}  // namespace

TEST_CASE("parse a full config") {
  const auto cfg = parse_config_string(kBase);
  CHECK(cfg.k() == 2);
  CHECK(cfg.alphabet.label(1) == "B");
  CHECK(cfg.n_list == std::vector<std::size_t>{20, 40});
  CHECK(cfg.samples == 4000u);
  CHECK(cfg.seed == 11u);
  CHECK(cfg.graphs == 2u);
  REQUIRE(cfg.target.has_value());
  CHECK((*cfg.target)(0, 1) == doctest::Approx(0.375));
  const auto ev = cfg.event();
  REQUIRE(std::holds_alternative<Ball>(ev));
  CHECK(std::get<Ball>(ev).radius == 0.05);
  CHECK(std::get<Ball>(ev).center == *cfg.target);
}

TEST_CASE("row tables, comments and schedules") {
  const auto cfg = parse_config_string(R"(
[model]
mu = 0.2 0.3 0.5   # three types
schedule = scaled 2
lambda =
  1 0.5 0
  0.5 2 1
  0 1 3
[target]
pi =
  0.1 0.05 0
  0.05 0.2 0.1
  0 0.1 0.3
[event]
kind = half_space
epsilon = 0.01
[run]
n = 30
estimator = is
conditional = false
)");
  CHECK(cfg.k() == 3);
  CHECK(cfg.lambda(0, 1) == 0.5);
  CHECK(cfg.lambda(2, 2) == 3.0);
  CHECK(cfg.schedule.a(10) == doctest::Approx(0.2));
  CHECK_FALSE(cfg.conditional);
  CHECK(cfg.estimator == EstimatorChoice::Is);
  CHECK(std::holds_alternative<HalfSpace>(cfg.event()));
}

TEST_CASE("validation errors carry a reason and a line") {
  CHECK(validation_message("[model]\nmu = 0.5 0.6\nlambda = 1 1; 1 1\n").find("sum to 1") != std::string::npos);
  CHECK(validation_message("[model]\nmu = 0.5 0.5\nlambda = 1 2; 1 1\n").find("not symmetric") != std::string::npos);
  CHECK(validation_message("[model]\nmu = 0.5 0.5\nlambda = 1 1; 1 1\n[run]\nestimator = fast\n")
            .find("line 5") != std::string::npos);
  CHECK(validation_message("[model]\nmu = 0.5 0.5\nlambda = 1 1; 1 1\n[run]\nn = ten\n").find("line") !=
        std::string::npos);
  CHECK(validation_message("[model]\nmu = 0.5 0.5\nlambda = 1 1; 1 1\nbogus = 3\n").find("bogus") !=
        std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/trg.cfg"), ValidationError);
}

TEST_CASE("legendre command") {
  SUBCASE("at the typical measure every quantity vanishes") {
    const auto cfg = parse_config_string(std::string(kBase).replace(std::string(kBase).find("1.5"), 3, "1.0"));
    std::ostringstream out;
    CHECK(cmd_legendre(cfg, quiet(), out) == ExitCode::Ok);
    const auto kv = report_of(out.str());
    CHECK(std::stod(kv.at("kullback_action")) == 0.0);
    CHECK(std::abs(std::stod(kv.at("legendre_sup"))) < 1e-12);
    CHECK(kv.at("status") == "finite");
  }
  SUBCASE("twice the typical measure") {
    const auto cfg = parse_config_string(std::string(kBase).replace(std::string(kBase).find("1.5"), 3, "2.0"));
    std::ostringstream out;
    CHECK(cmd_legendre(cfg, quiet(), out) == ExitCode::Ok);
    const auto kv = report_of(out.str());
    CHECK(std::stod(kv.at("kullback_action")) == doctest::Approx(0.193147180559945).epsilon(1e-12));
    CHECK(std::stod(kv.at("gap")) <= 1e-8);
  }
  SUBCASE("off-support target diverges") {
    const auto cfg = parse_config_string(R"(
[model]
mu = 0.5 0.5
lambda = 1 0; 0 1
[target]
pi = 0.2 0.15; 0.15 0.2
)");
    std::ostringstream out;
    CHECK(cmd_legendre(cfg, quiet(), out) == ExitCode::Ok);
    const auto kv = report_of(out.str());
    CHECK(kv.at("status") == "diverging");
    CHECK(kv.at("kullback_action") == "inf");
  }
}

TEST_CASE("rate-exact output") {
  SUBCASE("whole space has rate zero") {
    const auto cfg = parse_config_string(with_event("[event]\nkind = whole"));
    std::ostringstream out;
    CHECK(cmd_rate_exact(cfg, quiet(), out) == ExitCode::Ok);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "n,method,log_prob,rate,ci_low,ci_high,runtime_seconds");
    for (int i = 1; i <= 2; ++i) {
      const auto f = split(lines[i], ',');
      CHECK(f[1] == "exact");
      CHECK(std::stod(f[2]) == 0.0);
      CHECK(std::stod(f[3]) == 0.0);
    }
    CHECK(split(lines[3], ',')[0] == "inf");
  }
  SUBCASE("ball footer holds the infimum") {
    const auto cfg = parse_config_string(kBase);
    std::ostringstream out;
    CHECK(cmd_rate_exact(cfg, quiet(), out) == ExitCode::Ok);
    const auto lines = lines_of(out.str());
    const auto footer = split(lines.back(), ',');
    CHECK(footer[0] == "inf");
    CHECK(footer[1] == "reference_inf_H");
    const double inf_h = std::stod(footer[3]);
    CHECK(inf_h > 0.0);
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) CHECK(std::stod(split(lines[i], ',')[3]) > inf_h);
  }
}

TEST_CASE("json mirrors csv") {
  const auto cfg = parse_config_string(kBase);
  std::ostringstream csv, js;
  auto opts = quiet();
  cmd_rate_exact(cfg, opts, csv);
  opts.format = OutputFormat::Json;
  cmd_rate_exact(cfg, opts, js);
  const auto arr = nlohmann::json::parse(js.str());
  const auto lines = lines_of(csv.str());
  REQUIRE(arr.size() + 1 == lines.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto f = split(lines[i + 1], ',');
    CHECK(arr[i]["method"] == f[1]);
    CHECK(arr[i]["rate"].get<double>() == doctest::Approx(std::stod(f[3])).epsilon(1e-14));
  }
}

TEST_CASE("mcmillan-count on the whole space") {
  const auto cfg = parse_config_string(with_event("[event]\nkind = whole"));
  std::ostringstream out;
  CHECK(cmd_mcmillan(cfg, quiet(), out) == ExitCode::Ok);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].rfind("# note:", 0) == 0);
  CHECK(lines[1] == "n,log_card,entropy_term,gap,runtime_seconds");
  for (int i = 2; i <= 3; ++i) {
    const auto f = split(lines[i], ',');
    const double n = std::stod(f[0]);
    CHECK(std::stod(f[1]) == doctest::Approx(n * std::log(2.0) + n * (n - 1) / 2 * std::log(2.0)).epsilon(1e-12));
    CHECK(std::stod(f[2]) == doctest::Approx(n * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("rate-mc agrees with rate-exact on the smoke config") {
  const auto cfg = parse_config_string(kBase);
  std::ostringstream mc, ex;
  CHECK(cmd_rate_mc(cfg, quiet(), mc) == ExitCode::Ok);
  CHECK(cmd_rate_exact(cfg, quiet(), ex) == ExitCode::Ok);
  const auto ml = lines_of(mc.str()), el = lines_of(ex.str());
  for (int i = 1; i <= 2; ++i) {
    const auto m = split(ml[i], ','), e = split(el[i], ',');
    CHECK(m[0] == e[0]);
    const double rate = std::stod(e[3]);
    CHECK(rate >= std::stod(m[4]));
    CHECK(rate <= std::stod(m[5]));
  }
}

TEST_CASE("sample and measure") {
  const auto cfg = parse_config_string(kBase);
  const auto d1 = scratch("s1"), d2 = scratch("s2");
  auto o1 = quiet(), o2 = quiet();
  o1.out = d1.string();
  o2.out = d2.string();
  std::ostringstream sink;
  CHECK(cmd_sample(cfg, o1, sink) == ExitCode::Ok);
  CHECK(cmd_sample(cfg, o2, sink) == ExitCode::Ok);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(d1))
    if (e.path().extension() == ".txt") files.push_back(e.path().filename().string());
  CHECK(files.size() == 4);  // two graphs for each of two sizes
  for (const auto& f : files) {
    std::ifstream a(d1 / f), b(d2 / f);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
    const auto g = read_graph(sa);
    std::ostringstream again;
    write_graph(again, g);
    CHECK(again.str() == sb.str());
  }
  CHECK(fs::exists(d1 / "summary.csv"));

  auto mo = quiet();
  mo.inputs = {(d1 / files.front()).string()};
  std::ostringstream measured;
  CHECK(cmd_measure(cfg, mo, measured) == ExitCode::Ok);
  CHECK_FALSE(measured.str().empty());

  auto missing = quiet();
  CHECK_THROWS_AS(cmd_sample(cfg, missing, sink), ValidationError);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("process exit codes") {
  const auto dir = scratch("exit");
  const auto good = dir / "good.cfg";
  const auto bad = dir / "bad.cfg";
  const auto heavy = dir / "heavy.cfg";
  std::ofstream(good) << kBase;
  std::ofstream(bad) << "[model]\nmu = 0.5 0.6\nlambda = 1 1; 1 1\n";
  std::ofstream(heavy) << std::string(kBase) + "budget = 5\n";

  CHECK(run_cli("legendre --config " + good.string()) == 0);
  CHECK(run_cli("rate-exact --config " + good.string() + " --format json --out " + (dir / "r.json").string()) == 0);
  CHECK(fs::exists(dir / "r.json"));
  CHECK(run_cli("rate-exact --config " + bad.string()) == 1);
  CHECK(run_cli("rate-exact --config " + good.string() + " --format xml") == 1);
  CHECK(run_cli("rate-exact") == 1);
  CHECK(run_cli("no-such-command") == 1);
  CHECK(run_cli("mcmillan-count --config " + heavy.string()) == 2);
  fs::remove_all(dir);
}
