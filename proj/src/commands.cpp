#include "trg/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "trg/error.hpp"
#include "trg/legendre.hpp"
#include "trg/montecarlo.hpp"
#include "trg/oracle.hpp"
#include "trg/parallel.hpp"
#include "trg/verify.hpp"

namespace trg {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

json json_num(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Output target: the given stream or a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output `" + path + "`");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

std::string plot_path(const std::string& out) {
  if (out.empty()) return "";
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "_plot.csv")).string();
}

struct ResultRow {
  std::string n;
  std::string method;
  std::optional<double> log_prob;
  std::optional<double> rate;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  double runtime_seconds = 0.0;
};

std::string opt(const std::optional<double>& x) { return x ? num(*x) : ""; }

void write_rows(std::ostream& os, const std::vector<ResultRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    os << "n,method,log_prob,rate,ci_low,ci_high,runtime_seconds\n";
    for (const auto& r : rows)
      os << r.n << ',' << r.method << ',' << opt(r.log_prob) << ',' << opt(r.rate) << ',' << opt(r.ci_low) << ','
         << opt(r.ci_high) << ',' << num(r.runtime_seconds) << '\n';
    return;
  }
  json arr = json::array();
  for (const auto& r : rows) {
    json o;
    o["n"] = r.n;
    o["method"] = r.method;
    o["log_prob"] = r.log_prob ? json_num(*r.log_prob) : json(nullptr);
    o["rate"] = r.rate ? json_num(*r.rate) : json(nullptr);
    o["ci_low"] = r.ci_low ? json_num(*r.ci_low) : json(nullptr);
    o["ci_high"] = r.ci_high ? json_num(*r.ci_high) : json(nullptr);
    o["runtime_seconds"] = r.runtime_seconds;
    arr.push_back(o);
  }
  os << arr.dump(2) << '\n';
}

void write_plot(const std::string& path, const std::vector<ResultRow>& rows, double reference,
                const std::vector<std::pair<std::string, double>>& extrapolated) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open plot output `" + path + "`");
  os << "x,y,yref,method\n";
  for (const auto& r : rows) {
    if (!r.rate || r.n == "inf") continue;
    os << num(1.0 / std::stod(r.n)) << ',' << num(*r.rate) << ',' << num(reference) << ',' << r.method << '\n';
  }
  for (const auto& [name, value] : extrapolated) os << "0," << num(value) << ',' << num(reference) << ',' << name << '\n';
}

ResultRow reference_row(const ExperimentConfig& cfg) {
  ResultRow ref;
  ref.n = "inf";
  ref.method = "reference_inf_H";
  ref.rate = event_rate_infimum(cfg.event(), cfg.typical());
  return ref;
}

int workers_of(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return opts.workers ? *opts.workers : cfg.workers;
}

std::uint64_t seed_of(const ExperimentConfig& cfg, const CommandOptions& opts) {
  return opts.seed ? *opts.seed : cfg.seed;
}

std::string join_values(std::span<const double> xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + num(xs[i]);
  return s;
}

bool mass_identity_holds(const ColouredGraph& g, const PairMeasure& l2, const ConnectionSchedule& schedule) {
  const double lhs = schedule.edge_normalizer(g.n()) * l2.total_mass();
  const double rhs = 2.0 * static_cast<double>(g.edges().size());
  return std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs);
}

}  // namespace

ExitCode cmd_sample(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  if (opts.out.empty()) throw ValidationError("sample needs --out DIR for the graph files");
  std::filesystem::create_directories(opts.out);
  const std::uint64_t seed = seed_of(cfg, opts);
  std::ostringstream summary;
  summary << "file,n,edges,l1,l2,mass_identity\n";
  bool ok = true;
  std::uint64_t index = 0;
  for (auto n : cfg.n_list)
    for (std::size_t i = 0; i < cfg.graphs; ++i, ++index) {
      Rng rng = make_substream(seed, index);
      const ColouredGraph g = cfg.conditional
                                  ? sample_graph_conditional(counts_from_law(cfg.mu, n), cfg.lambda, cfg.schedule, rng)
                                  : sample_graph(n, cfg.mu, cfg.lambda, cfg.schedule, rng);
      const std::string name = "graph_n" + std::to_string(n) + "_" + std::to_string(i) + ".txt";
      {
        std::ofstream gf(std::filesystem::path(opts.out) / name);
        if (!gf) throw std::runtime_error("cannot write graph file " + name);
        write_graph(gf, g);
      }
      const PairMeasure l2 = empirical_pair_measure(g, cfg.schedule);
      const bool identity = mass_identity_holds(g, l2, cfg.schedule);
      ok = ok && identity;
      const TypeLaw l1 = empirical_type_measure(g);
      summary << name << ',' << n << ',' << g.edges().size() << ',' << join_values(l1.weights())
              << ',' << join_values(l2.values()) << ',' << (identity ? "ok" : "FAIL") << '\n';
    }
  std::ofstream(std::filesystem::path(opts.out) / "summary.csv") << summary.str();
  out << summary.str();
  return ok ? ExitCode::Ok : ExitCode::Runtime;
}

ExitCode cmd_measure(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  if (opts.inputs.empty()) throw ValidationError("measure needs at least one graph file");
  Sink sink(opts.out, out);
  auto& os = sink.stream();
  os << "file,n,k,edges,l1,l2,mass_identity\n";
  bool ok = true;
  for (const auto& path : opts.inputs) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open graph file `" + path + "`");
    const ColouredGraph g = read_graph(in);
    const PairMeasure l2 = empirical_pair_measure(g, cfg.schedule);
    const bool identity = mass_identity_holds(g, l2, cfg.schedule);
    ok = ok && identity;
    const TypeLaw l1 = empirical_type_measure(g);
    os << path << ',' << g.n() << ',' << g.k() << ',' << g.edges().size() << ','
       << join_values(l1.weights()) << ',' << join_values(l2.values()) << ','
       << (identity ? "ok" : "FAIL") << '\n';
  }
  return ok ? ExitCode::Ok : ExitCode::Runtime;
}

ExitCode cmd_rate_exact(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  set_threads(workers_of(cfg, opts));
  const Event event = cfg.event();
  std::vector<ResultRow> rows;
  std::vector<std::size_t> ns;
  std::vector<double> rates;
  for (auto n : cfg.n_list) {
    ResultRow row;
    row.n = std::to_string(n);
    row.method = "exact";
    const auto t0 = Clock::now();
    try {
      OracleOptions o;
      o.conditional = cfg.conditional;
      o.budget = cfg.budget;
      const double lp = event_log_probability(n, event, cfg.lambda, cfg.mu, cfg.schedule, o);
      if (std::isfinite(lp)) {
        row.log_prob = lp;
        row.rate = -lp / static_cast<double>(n);
        ns.push_back(n);
        rates.push_back(*row.rate);
      }
    } catch (const std::exception& e) {
      std::cerr << "rate-exact: n = " << n << ": " << e.what() << '\n';
    }
    row.runtime_seconds = opts.omit_runtime ? 0.0 : seconds_since(t0);
    rows.push_back(row);
  }
  const ResultRow ref = reference_row(cfg);
  rows.push_back(ref);
  Sink sink(opts.out, out);
  write_rows(sink.stream(), rows, opts.format);
  std::vector<std::pair<std::string, double>> extrapolated;
  if (!ns.empty()) {
    const auto ex = extrapolate_rates(ns, rates);
    extrapolated = {{"richardson", ex.richardson}, {"linear_fit", ex.linear_fit}, {"stirling_fit", ex.stirling_fit}};
  }
  write_plot(plot_path(opts.out), rows, *ref.rate, extrapolated);
  return ExitCode::Ok;
}

ExitCode cmd_rate_mc(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  const int workers = workers_of(cfg, opts);
  set_threads(workers);
  const Event event = cfg.event();
  EstimatorConfig ec;
  ec.kind = cfg.estimator == EstimatorChoice::Is ? EstimatorKind::Tilted : EstimatorKind::Naive;
  if (ec.kind == EstimatorKind::Tilted) ec.tilt = cfg.tilt_function();
  ec.sampler.samples = cfg.samples;
  ec.sampler.seed = seed_of(cfg, opts);
  ec.sampler.workers = workers;
  ec.sampler.conditional = cfg.conditional;
  const std::string method = ec.kind == EstimatorKind::Tilted ? "is" : "mc";

  std::vector<ResultRow> rows;
  for (auto n : cfg.n_list) {
    ResultRow row;
    row.n = std::to_string(n);
    row.method = method;
    const auto t0 = Clock::now();
    try {
      const auto est = rate_estimate({n}, [&](std::size_t) { return event; }, cfg.mu, cfg.lambda, cfg.schedule, ec);
      const auto& r = est.front();
      if (r.has_rate) {
        row.log_prob = r.log_prob;
        row.rate = r.rate;
        row.ci_low = r.ci_low;
        row.ci_high = r.ci_high;
      } else {
        std::cerr << "rate-mc: n = " << n << ": no hits in " << r.estimate.samples
                  << " samples (95% upper bound " << num(*r.estimate.zero_hit_upper_bound) << ")\n";
      }
    } catch (const std::exception& e) {
      std::cerr << "rate-mc: n = " << n << ": " << e.what() << '\n';
    }
    row.runtime_seconds = opts.omit_runtime ? 0.0 : seconds_since(t0);
    rows.push_back(row);
  }
  const ResultRow ref = reference_row(cfg);
  rows.push_back(ref);
  Sink sink(opts.out, out);
  write_rows(sink.stream(), rows, opts.format);
  write_plot(plot_path(opts.out), rows, *ref.rate, {});
  return ExitCode::Ok;
}

ExitCode cmd_legendre(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  if (!cfg.target) throw ValidationError("legendre needs a [target] pi or pi_scale");
  const PairMeasure& pi = *cfg.target;
  const PairMeasure m = cfg.typical();
  json report;
  std::ostringstream text;
  const double closed = kullback_action(pi, m);
  const DualSolveReport sup = legendre_sup(pi, m, 1e-12);
  report["kullback_action"] = json_num(closed);
  text << "kullback_action," << num(closed) << '\n';
  if (sup.diverging) {
    report["status"] = "diverging";
    text << "status,diverging\n";
    std::string cells;
    json jcells = json::array();
    for (auto [a, b] : witness_set(pi, m)) {
      cells += (cells.empty() ? "" : " ") + std::string("(") + cfg.alphabet.label(a) + ":" + cfg.alphabet.label(b) + ")";
      jcells.push_back({cfg.alphabet.label(a), cfg.alphabet.label(b)});
    }
    report["witness_cells"] = jcells;
    text << "witness_cells," << cells << '\n';
    text << "eta,witness_value,dual_value\n";
    json curve = json::array();
    for (double eta : {1e-1, 1e-2, 1e-4, 1e-8, 1e-16}) {
      const TestFunction w = divergence_witness(pi, m, eta);
      const double dv = dual_value(w, pi, m);
      text << num(eta) << ',' << num(-std::log(eta)) << ',' << num(dv) << '\n';
      curve.push_back({{"eta", eta}, {"witness_value", -std::log(eta)}, {"dual_value", json_num(dv)}});
    }
    report["witness_curve"] = curve;
  } else {
    const TestFunction tilt = optimal_tilt(pi, m);
    double deviation = 0.0;
    for (std::size_t a = 0; a < pi.dim(); ++a)
      for (std::size_t b = 0; b < pi.dim(); ++b)
        if (pi(a, b) > 0.0) deviation = std::max(deviation, std::abs(sup.maximizer(a, b) - tilt(a, b)));
    report["status"] = "finite";
    report["legendre_sup"] = json_num(sup.value);
    report["gap"] = json_num(std::abs(sup.value - closed));
    report["iterations"] = sup.iterations;
    report["converged"] = sup.converged;
    report["max_maximizer_deviation"] = deviation;
    text << "status,finite\n"
         << "legendre_sup," << num(sup.value) << '\n'
         << "gap," << num(std::abs(sup.value - closed)) << '\n'
         << "iterations," << sup.iterations << '\n'
         << "converged," << (sup.converged ? "true" : "false") << '\n'
         << "max_maximizer_deviation," << num(deviation) << '\n'
         << "t,truncation_gap\n";
    json curve = json::array();
    for (double t : cfg.truncation_levels) {
      const double gap = truncation_gap(pi, m, t);
      text << num(t) << ',' << num(gap) << '\n';
      curve.push_back({{"t", t}, {"truncation_gap", gap}});
    }
    report["truncation_curve"] = curve;
  }
  Sink sink(opts.out, out);
  if (opts.format == OutputFormat::Json)
    sink.stream() << report.dump(2) << '\n';
  else
    sink.stream() << text.str();
  return ExitCode::Ok;
}

ExitCode cmd_mcmillan(const ExperimentConfig& cfg, const CommandOptions& opts, std::ostream& out) {
  set_threads(workers_of(cfg, opts));
  const Event event = cfg.event();
  if (!std::holds_alternative<Ball>(event) && !std::holds_alternative<WholeSpace>(event))
    throw ValidationError("mcmillan-count needs a ball (or whole) event");
  const PairMeasure rho = std::holds_alternative<Ball>(event) ? std::get<Ball>(event).center : cfg.typical();
  const double entropy = mcmillan_entropy(rho, cfg.lambda, cfg.mu);
  static const char* kNote =
      "log_card is the exact log-count of coloured graphs with L2 in the ball; entropy_term is n times the "
      "McMillan entropy of the ball centre. The gap carries a Theta(n log n) edge-placement term, so the two are "
      "reported side by side rather than equated.";

  json arr = json::array();
  std::ostringstream csv;
  csv << "# note: " << kNote << '\n';
  csv << "n,log_card,entropy_term,gap,runtime_seconds\n";
  bool partial = false;
  for (auto n : cfg.n_list) {
    const auto t0 = Clock::now();
    OracleOptions o;
    o.conditional = false;
    o.budget = cfg.budget;
    try {
      const double log_card = event_log_count(n, event, cfg.lambda, cfg.mu, cfg.schedule, o);
      const double term = static_cast<double>(n) * entropy;
      const double rt = opts.omit_runtime ? 0.0 : seconds_since(t0);
      csv << n << ',' << num(log_card) << ',' << num(term) << ',' << num(log_card - term) << ',' << num(rt) << '\n';
      arr.push_back({{"n", n},
                     {"log_card", json_num(log_card)},
                     {"entropy_term", json_num(term)},
                     {"gap", json_num(log_card - term)},
                     {"runtime_seconds", rt}});
    } catch (const BudgetExceeded& e) {
      std::cerr << "mcmillan-count: n = " << n << ": " << e.what() << '\n';
      partial = true;
    }
  }
  Sink sink(opts.out, out);
  if (opts.format == OutputFormat::Json)
    sink.stream() << json{{"note", kNote}, {"rows", arr}}.dump(2) << '\n';
  else
    sink.stream() << csv.str();
  return partial ? ExitCode::Runtime : ExitCode::Ok;
}

ExitCode cmd_verify(const CommandOptions& opts, std::ostream& out) {
  if (opts.workers) set_threads(*opts.workers);
  const auto results = run_verification(out);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  return ok ? ExitCode::Ok : ExitCode::Runtime;
}

}  // namespace trg
