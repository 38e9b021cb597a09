#include "sgdsat/config.hpp"

#include <cmath>
#include <fstream>
#include <cctype>
#include <set>

#include "sgdsat/error.hpp"

namespace sgdsat {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { fail("bad_config", msg); }

double parse_number(const std::string& s, const std::string& expr) {
  if (s.empty()) return 1.0;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(v)) bad("stepsize expression '" + expr + "': bad number '" + s + "'");
  return v;
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    bad(std::string("key '") + key + "': " + e.what());
  }
}

std::vector<double> number_list(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) bad(std::string("key '") + key + "' must be a number or a nonempty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) bad(std::string("key '") + key + "' must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

ScheduleSpec parse_schedule(const json& j) {
  ScheduleSpec s;
  if (j.is_string()) {
    s.expr = j.get<std::string>();
    return s;
  }
  if (!j.is_object()) bad("schedule entries must be strings or objects");
  reject_unknown(j, {"c0", "alpha", "override_admissibility"}, "schedule");
  if (!j.contains("c0")) bad("schedule is missing 'c0'");
  const json& c0 = j.at("c0");
  if (c0.is_string()) {
    s.expr = c0.get<std::string>();
  } else if (c0.is_number()) {
    s.expr = c0.dump();
  } else {
    bad("schedule 'c0' must be a string or a number");
  }
  if (j.contains("alpha")) s.alpha = get<double>(j, "alpha");
  if (j.contains("override_admissibility")) s.override_admissibility = get<bool>(j, "override_admissibility");
  return s;
}

}  // namespace

double resolve_c0(const std::string& expr, double c, int n) {
  require(c > 0.0 && n >= 1, "resolve_c0: need c > 0, n >= 1");
  std::string e;
  for (char ch : expr)
    if (!std::isspace(static_cast<unsigned char>(ch))) e += ch;
  if (e.empty()) bad("empty stepsize expression");
  if (e.find('c') == std::string::npos) {
    const double v = parse_number(e, expr);
    if (!(v > 0.0)) bad("stepsize '" + expr + "' must be positive");
    return v;
  }
  // [coef][*]c[/denominator], denominator one of d, n, dn, d*n, (dn), (d*n), (d)
  const std::size_t at = e.find('c');
  std::string head = e.substr(0, at);
  if (!head.empty() && head.back() == '*') head.pop_back();
  const double coef = parse_number(head, expr);
  std::string tail = e.substr(at + 1);
  double denom = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') bad("cannot parse stepsize expression '" + expr + "'");
    tail.erase(0, 1);
    if (tail.size() >= 2 && tail.front() == '(' && tail.back() == ')') tail = tail.substr(1, tail.size() - 2);
    if (tail.empty()) bad("stepsize expression '" + expr + "' has an empty denominator");
    bool has_n = false;
    if (tail.back() == 'n') {
      has_n = true;
      tail.pop_back();
      if (!tail.empty() && tail.back() == '*') tail.pop_back();
    }
    denom = parse_number(tail, expr) * (has_n ? n : 1);
  }
  const double v = coef * c / denom;
  if (!(v > 0.0) || !std::isfinite(v)) bad("stepsize '" + expr + "' must resolve to a positive number");
  return v;
}

Cadence ExperimentConfig::cadence() const {
  Cadence cd;
  cd.with_residual = false;
  if (checkpoint == "epochs") {
    cd.kind = Cadence::Kind::epochs;
    cd.every = checkpoint_every;
  } else {
    cd.kind = Cadence::Kind::geometric;
    cd.factor = checkpoint_factor;
  }
  return cd;
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  reject_unknown(j,
                 {"problem", "n", "nu", "eps", "schedules", "runs", "max_epochs", "base_seed", "noise_seed",
                  "preconditioned", "landweber_stepsize", "landweber_max_iters", "landweber_early_exit",
                  "checkpoint", "checkpoint_every", "checkpoint_factor", "fit_window", "threads"},
                 "config");
  ExperimentConfig c;
  if (j.contains("problem")) c.problem = get<std::string>(j, "problem");
  if (j.contains("n")) c.n = get<int>(j, "n");
  if (j.contains("nu")) c.nu = number_list(j, "nu");
  if (j.contains("eps")) c.eps = number_list(j, "eps");
  if (j.contains("schedules")) {
    const json& s = j.at("schedules");
    if (!s.is_array() || s.empty()) bad("'schedules' must be a nonempty array");
    c.schedules.clear();
    for (const auto& e : s) c.schedules.push_back(parse_schedule(e));
  }
  if (j.contains("runs")) c.runs = get<int>(j, "runs");
  if (j.contains("max_epochs")) c.max_epochs = get<double>(j, "max_epochs");
  if (j.contains("base_seed")) c.base_seed = get<std::uint64_t>(j, "base_seed");
  if (j.contains("noise_seed")) c.noise_seed = get<std::uint64_t>(j, "noise_seed");
  if (j.contains("preconditioned")) c.preconditioned = get<bool>(j, "preconditioned");
  if (j.contains("landweber_stepsize")) {
    const json& v = j.at("landweber_stepsize");
    c.landweber_stepsize = v.is_number() ? v.dump() : get<std::string>(j, "landweber_stepsize");
  }
  if (j.contains("landweber_max_iters")) c.landweber_max_iters = get<long long>(j, "landweber_max_iters");
  if (j.contains("landweber_early_exit")) c.landweber_early_exit = get<double>(j, "landweber_early_exit");
  if (j.contains("checkpoint")) c.checkpoint = get<std::string>(j, "checkpoint");
  if (j.contains("checkpoint_every")) c.checkpoint_every = get<double>(j, "checkpoint_every");
  if (j.contains("checkpoint_factor")) c.checkpoint_factor = get<double>(j, "checkpoint_factor");
  if (j.contains("fit_window")) {
    const auto w = number_list(j, "fit_window");
    if (w.size() != 2 || !(w[0] > 0.0 && w[1] > w[0])) bad("'fit_window' must be [lo, hi] with 0 < lo < hi");
    c.fit_window = std::make_pair(w[0], w[1]);
  }
  if (j.contains("threads")) c.threads = get<int>(j, "threads");

  if (c.problem != "shaw" && c.problem != "gravity" && c.problem != "phillips" && c.problem != "s-shaw" &&
      c.problem != "s-gravity" && c.problem != "s-phillips")
    bad("unknown problem '" + c.problem + "'");
  if (c.n < 4) bad("'n' must be >= 4");
  if ((c.problem == "phillips" || c.problem == "s-phillips") && c.n % 4 != 0) bad("phillips requires 'n' divisible by 4");
  if (c.runs < 1) bad("'runs' must be >= 1");
  if (!(c.max_epochs > 0.0)) bad("'max_epochs' must be > 0");
  for (double v : c.nu)
    if (!(v >= 0.0)) bad("'nu' entries must be >= 0");
  for (double v : c.eps)
    if (!(v >= 0.0)) bad("'eps' entries must be >= 0");
  for (const auto& s : c.schedules) {
    if (!(s.alpha >= 0.0 && s.alpha < 1.0)) bad("schedule alpha must lie in [0, 1)");
    resolve_c0(s.expr, 1.0, c.n);
  }
  if (c.checkpoint != "epochs" && c.checkpoint != "geometric") bad("'checkpoint' must be 'epochs' or 'geometric'");
  if (!(c.checkpoint_every > 0.0)) bad("'checkpoint_every' must be > 0");
  if (!(c.checkpoint_factor > 1.0)) bad("'checkpoint_factor' must exceed 1");
  if (c.landweber_stepsize != "inverse_norm_sq" && !(parse_number(c.landweber_stepsize, c.landweber_stepsize) > 0.0))
    bad("'landweber_stepsize' must be 'inverse_norm_sq' or a positive number");
  if (c.landweber_max_iters < 0) bad("'landweber_max_iters' must be >= 0");
  if (c.landweber_early_exit < 0.0) bad("'landweber_early_exit' must be >= 0");
  if (c.threads < 0) bad("'threads' must be >= 0");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("bad_config", "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
  json s = json::array();
  for (const auto& e : c.schedules)
    s.push_back({{"c0", e.expr}, {"alpha", e.alpha}, {"override_admissibility", e.override_admissibility}});
  json j = {{"problem", c.problem},
            {"n", c.n},
            {"nu", c.nu},
            {"eps", c.eps},
            {"schedules", s},
            {"runs", c.runs},
            {"max_epochs", c.max_epochs},
            {"base_seed", c.base_seed},
            {"noise_seed", c.noise_seed},
            {"preconditioned", c.preconditioned},
            {"landweber_stepsize", c.landweber_stepsize},
            {"landweber_max_iters", c.landweber_max_iters},
            {"landweber_early_exit", c.landweber_early_exit},
            {"checkpoint", c.checkpoint},
            {"checkpoint_every", c.checkpoint_every},
            {"checkpoint_factor", c.checkpoint_factor},
            {"threads", c.threads}};
  if (c.fit_window) j["fit_window"] = {c.fit_window->first, c.fit_window->second};
  return j;
}

void apply_full_scale(ExperimentConfig& cfg) {
  cfg.n = 1000;
  cfg.runs = 100;
}

}  // namespace sgdsat
