#include "trg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "trg/error.hpp"
#include "trg/legendre.hpp"
#include "trg/oracle.hpp"

namespace trg {

namespace {

struct RawValue {
  std::string text;
  std::vector<std::vector<double>> rows;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

std::optional<std::vector<double>> parse_numbers(const std::string& s) {
  std::vector<double> out;
  for (const auto& w : split_words(s)) {
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(w, &used);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (used != w.size()) return std::nullopt;
    out.push_back(x);
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ValidationError("config line " + std::to_string(line) + ": " + msg);
}

const std::set<std::string> kKnownKeys = {
    "model.labels",    "model.mu",       "model.lambda",  "model.schedule", "target.pi",
    "target.pi_scale", "event.kind",     "event.center",  "event.radius",   "event.g",
    "event.epsilon",   "run.n",          "run.conditional", "run.estimator", "run.samples",
    "run.seed",        "run.workers",    "run.graphs",    "run.truncation", "run.budget",
    "run.tilt"};

std::map<std::string, RawValue> tokenize(std::istream& in) {
  std::map<std::string, RawValue> out;
  std::string section;
  std::string line;
  int lineno = 0;
  RawValue* open_table = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      open_table = nullptr;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!open_table) fail(lineno, "expected `key = value`");
      auto row = parse_numbers(line);
      if (!row) fail(lineno, "table rows must be whitespace-separated numbers");
      open_table->rows.push_back(*row);
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (!kKnownKeys.count(key)) fail(lineno, "unknown key `" + key + "`");
    if (out.count(key)) fail(lineno, "duplicate key `" + key + "`");
    RawValue& v = out[key];
    v.text = trim(line.substr(eq + 1));
    v.line = lineno;
    open_table = nullptr;
    if (v.text.empty()) {
      open_table = &v;
    } else if (v.text.find(';') != std::string::npos) {
      std::string rest = v.text;
      std::size_t pos;
      while (true) {
        pos = rest.find(';');
        auto row = parse_numbers(rest.substr(0, pos));
        if (!row) fail(lineno, "inline table rows must be numbers separated by ';'");
        v.rows.push_back(*row);
        if (pos == std::string::npos) break;
        rest = rest.substr(pos + 1);
      }
    }
  }
  return out;
}

SquareTable table_of(const RawValue& v, std::size_t k, const std::string& name) {
  if (v.rows.empty()) fail(v.line, name + " needs a table (rows on the following lines)");
  if (v.rows.size() != k) fail(v.line, name + " must have " + std::to_string(k) + " rows");
  for (const auto& r : v.rows)
    if (r.size() != k) fail(v.line, name + " rows must have " + std::to_string(k) + " entries");
  return SquareTable::from_rows(v.rows);
}

double number_of(const RawValue& v, const std::string& name) {
  auto nums = parse_numbers(v.text);
  if (!nums || nums->size() != 1) fail(v.line, name + " must be a single number");
  return nums->front();
}

std::uint64_t unsigned_of(const RawValue& v, const std::string& name) {
  const double x = number_of(v, name);
  if (!(x >= 0.0) || std::floor(x) != x || x > 1.8e19) fail(v.line, name + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

bool bool_of(const RawValue& v, const std::string& name) {
  if (v.text == "true" || v.text == "1" || v.text == "yes") return true;
  if (v.text == "false" || v.text == "0" || v.text == "no") return false;
  fail(v.line, name + " must be true or false");
}

template <typename Fn>
auto with_line(const RawValue& v, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    fail(v.line, e.what());
  }
}

}  // namespace

Event ExperimentConfig::event() const {
  const PairMeasure m = typical();
  switch (event_kind) {
    case EventKind::Whole:
      return WholeSpace{};
    case EventKind::Ball: {
      const PairMeasure c = center ? *center : target ? *target : m;
      return Ball{c, radius};
    }
    case EventKind::HalfSpace: {
      if (!target) throw ValidationError("half_space event needs a [target] pi or pi_scale");
      const TestFunction dir = g ? *g : optimal_tilt(*target, m);
      return half_space_neighbourhood(dir, *target, epsilon);
    }
  }
  return WholeSpace{};
}

TestFunction ExperimentConfig::tilt_function() const {
  if (tilt) return *tilt;
  if (!target) throw ValidationError("the `is` estimator needs [run] tilt or a [target]");
  return optimal_tilt(*target, typical());
}

ExperimentConfig parse_config(std::istream& in) {
  auto raw = tokenize(in);
  ExperimentConfig cfg;
  const auto get = [&](const std::string& key) -> const RawValue* {
    auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };

  const RawValue* mu = get("model.mu");
  if (!mu) throw ValidationError("config: [model] mu is required");
  auto weights = parse_numbers(mu->text);
  if (!weights || weights->empty()) fail(mu->line, "mu must be a list of numbers");
  cfg.mu = with_line(*mu, [&] { return TypeLaw(*weights); });
  const std::size_t k = cfg.mu.dim();

  if (const auto* v = get("model.labels")) {
    auto labels = split_words(v->text);
    if (labels.size() != k) fail(v->line, "labels must have one entry per mu weight");
    cfg.alphabet = with_line(*v, [&] { return TypeAlphabet(labels); });
  } else {
    cfg.alphabet = TypeAlphabet::numbered(k);
  }

  const RawValue* lambda = get("model.lambda");
  if (!lambda) throw ValidationError("config: [model] lambda is required");
  cfg.lambda = with_line(*lambda, [&] { return Kernel(table_of(*lambda, k, "lambda")); });

  if (const auto* v = get("model.schedule")) {
    const auto words = split_words(v->text);
    if (words.size() == 1 && words[0] == "near_critical") {
      cfg.schedule = ConnectionSchedule::near_critical();
    } else if (words.size() == 2 && words[0] == "scaled") {
      auto c = parse_numbers(words[1]);
      if (!c) fail(v->line, "scaled schedule needs a number");
      cfg.schedule = with_line(*v, [&] { return ConnectionSchedule::scaled(c->front()); });
    } else {
      fail(v->line, "schedule must be `near_critical` or `scaled <c>`");
    }
  }

  const PairMeasure m = cfg.typical();
  if (const auto* v = get("target.pi")) {
    cfg.target = with_line(*v, [&] { return PairMeasure(table_of(*v, k, "pi")); });
  }
  if (const auto* v = get("target.pi_scale")) {
    if (cfg.target) fail(v->line, "give either pi or pi_scale, not both");
    const double s = number_of(*v, "pi_scale");
    if (!(s >= 0.0)) fail(v->line, "pi_scale must be >= 0");
    cfg.target = m.scaled(s);
  }

  if (const auto* v = get("event.kind")) {
    if (v->text == "whole")
      cfg.event_kind = EventKind::Whole;
    else if (v->text == "ball")
      cfg.event_kind = EventKind::Ball;
    else if (v->text == "half_space")
      cfg.event_kind = EventKind::HalfSpace;
    else
      fail(v->line, "event kind must be whole, ball or half_space");
  }
  if (const auto* v = get("event.center"))
    cfg.center = with_line(*v, [&] { return PairMeasure(table_of(*v, k, "center")); });
  if (const auto* v = get("event.radius")) {
    cfg.radius = number_of(*v, "radius");
    if (!(cfg.radius >= 0.0)) fail(v->line, "radius must be >= 0");
  }
  if (const auto* v = get("event.g")) cfg.g = with_line(*v, [&] { return TestFunction(table_of(*v, k, "g")); });
  if (const auto* v = get("event.epsilon")) {
    cfg.epsilon = number_of(*v, "epsilon");
    if (!(cfg.epsilon > 0.0)) fail(v->line, "epsilon must be > 0");
  }
  if (cfg.event_kind == EventKind::HalfSpace && !(cfg.epsilon > 0.0))
    throw ValidationError("config: half_space event needs epsilon > 0");

  if (const auto* v = get("run.n")) {
    cfg.n_list.clear();
    auto nums = parse_numbers(v->text);
    if (!nums || nums->empty()) fail(v->line, "n must be a list of positive integers");
    for (double x : *nums) {
      if (!(x >= 1.0) || std::floor(x) != x) fail(v->line, "n must be a list of positive integers");
      cfg.n_list.push_back(static_cast<std::size_t>(x));
    }
  }
  if (const auto* v = get("run.conditional")) cfg.conditional = bool_of(*v, "conditional");
  if (const auto* v = get("run.estimator")) {
    if (v->text == "exact")
      cfg.estimator = EstimatorChoice::Exact;
    else if (v->text == "mc")
      cfg.estimator = EstimatorChoice::Mc;
    else if (v->text == "is")
      cfg.estimator = EstimatorChoice::Is;
    else
      fail(v->line, "estimator must be exact, mc or is");
  }
  if (const auto* v = get("run.samples")) {
    cfg.samples = unsigned_of(*v, "samples");
    if (cfg.samples == 0) fail(v->line, "samples must be >= 1");
  }
  if (const auto* v = get("run.seed")) cfg.seed = unsigned_of(*v, "seed");
  if (const auto* v = get("run.workers")) {
    const auto w = unsigned_of(*v, "workers");
    if (w < 1 || w > 4096) fail(v->line, "workers must be in [1, 4096]");
    cfg.workers = static_cast<int>(w);
  }
  if (const auto* v = get("run.graphs")) cfg.graphs = unsigned_of(*v, "graphs");
  if (const auto* v = get("run.truncation")) {
    auto nums = parse_numbers(v->text);
    if (!nums || nums->empty()) fail(v->line, "truncation must be a list of levels t > 0");
    for (double t : *nums)
      if (!(t > 0.0)) fail(v->line, "truncation levels must be > 0");
    cfg.truncation_levels = *nums;
  }
  if (const auto* v = get("run.budget")) {
    cfg.budget = number_of(*v, "budget");
    if (!(cfg.budget >= 1.0)) fail(v->line, "budget must be >= 1");
  }
  if (const auto* v = get("run.tilt")) cfg.tilt = with_line(*v, [&] { return TestFunction(table_of(*v, k, "tilt")); });

  // the event must contain some measure with finite rate
  const Event ev = cfg.event();
  if (!std::isfinite(event_rate_infimum(ev, m)))
    throw ValidationError("config: event is infeasible: it contains no measure absolutely continuous w.r.t. "
                          "lambda mu (x) mu (rate infimum is +inf)");
  return cfg;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file `" + path + "`");
  return parse_config(in);
}

}  // namespace trg
