#include "sgdsat/report.hpp"

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "sgdsat/error.hpp"

namespace sgdsat {

using nlohmann::json;

namespace {

std::string fmt(const char* spec, double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

}  // namespace

std::string csv_number(double v) { return fmt("%.6g", v); }

std::string summaries_csv(const std::vector<RunSummary>& rows) {
  std::string out = "nu,eps,c0,alpha,e_sgd,k_sgd,e_lm,k_lm,stderr,slope\n";
  for (const auto& r : rows) {
    out += csv_number(r.nu) + ',' + csv_number(r.eps) + ',' + csv_number(r.c0) + ',' + csv_number(r.alpha) + ',' +
           csv_number(r.e_sgd) + ',' + csv_number(r.k_sgd) + ',' + csv_number(r.e_lm) + ',' +
           std::to_string(r.k_lm) + ',' + csv_number(r.e_sgd_stderr) + ',' + csv_number(r.slope) + '\n';
  }
  return out;
}

json summary_to_json(const RunSummary& s) {
  return {{"problem", s.problem},
          {"n", s.n},
          {"nu", num(s.nu)},
          {"eps", num(s.eps)},
          {"delta", num(s.delta)},
          {"schedule", s.schedule},
          {"c0", num(s.c0)},
          {"alpha", num(s.alpha)},
          {"admissible", s.admissible},
          {"admissibility", s.admissibility},
          {"preconditioned", s.preconditioned},
          {"runs", s.runs},
          {"max_epochs", num(s.max_epochs)},
          {"e_sgd", num(s.e_sgd)},
          {"k_sgd", num(s.k_sgd)},
          {"k_sgd_mean_traj", num(s.k_sgd_mean_traj)},
          {"stderr", num(s.e_sgd_stderr)},
          {"k_sgd_stderr", num(s.k_sgd_stderr)},
          {"e_lm", num(s.e_lm)},
          {"k_lm", s.k_lm},
          {"slope", num(s.slope)},
          {"slope_stderr", num(s.slope_stderr)},
          {"fit_r2", num(s.fit_r2)},
          {"exact_monotone", s.exact_monotone}};
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  s.problem = j.at("problem").get<std::string>();
  s.n = j.at("n").get<int>();
  s.nu = num_from(j, "nu");
  s.eps = num_from(j, "eps");
  s.delta = num_from(j, "delta");
  s.schedule = j.at("schedule").get<std::string>();
  s.c0 = num_from(j, "c0");
  s.alpha = num_from(j, "alpha");
  s.admissible = j.at("admissible").get<bool>();
  s.admissibility = j.at("admissibility").get<std::string>();
  s.preconditioned = j.at("preconditioned").get<bool>();
  s.runs = j.at("runs").get<int>();
  s.max_epochs = num_from(j, "max_epochs");
  s.e_sgd = num_from(j, "e_sgd");
  s.k_sgd = num_from(j, "k_sgd");
  s.k_sgd_mean_traj = num_from(j, "k_sgd_mean_traj");
  s.e_sgd_stderr = num_from(j, "stderr");
  s.k_sgd_stderr = num_from(j, "k_sgd_stderr");
  s.e_lm = num_from(j, "e_lm");
  s.k_lm = j.at("k_lm").get<long long>();
  s.slope = num_from(j, "slope");
  s.slope_stderr = num_from(j, "slope_stderr");
  s.fit_r2 = num_from(j, "fit_r2");
  s.exact_monotone = j.at("exact_monotone").get<bool>();
  return s;
}

json summaries_to_json(const std::vector<RunSummary>& rows) {
  json a = json::array();
  for (const auto& r : rows) a.push_back(summary_to_json(r));
  return a;
}

std::vector<RunSummary> summaries_from_json(const json& j) {
  std::vector<RunSummary> out;
  for (const auto& e : j) out.push_back(summary_from_json(e));
  return out;
}

std::string sgd_trace_csv(const CellTrace& t) {
  std::string out = "epoch,mean_sq_error,stderr\n";
  for (std::size_t i = 0; i < t.epochs.size(); ++i)
    out += csv_number(t.epochs[i]) + ',' + csv_number(t.mean[i]) + ',' + csv_number(t.stderr_mean[i]) + '\n';
  return out;
}

std::string landweber_trace_csv(const CellTrace& t) {
  std::string out = "iter,sq_error\n";
  for (std::size_t i = 0; i < t.lm_iters.size(); ++i)
    out += std::to_string(t.lm_iters[i]) + ',' + csv_number(t.lm_sq_error[i]) + '\n';
  return out;
}

std::string problem_csv(const TestProblem& p) {
  std::string out = "name,n,m\n" + problem_name(p.kind) + ',' + std::to_string(p.n) + ',' + std::to_string(p.m) + '\n';
  auto row = [&out](auto&& vec, Eigen::Index len) {
    for (Eigen::Index j = 0; j < len; ++j) {
      if (j) out += ',';
      out += fmt("%.17g", vec(j));
    }
    out += '\n';
  };
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) row(p.A.row(i), p.A.cols());
  row(p.x_e, p.x_e.size());
  return out;
}

json environment_fingerprint() {
  json j;
#if defined(__clang__)
  j["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  j["compiler"] = "gcc " + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__) + "." +
                  std::to_string(__GNUC_PATCHLEVEL__);
#else
  j["compiler"] = "unknown";
#endif
  j["cplusplus"] = static_cast<long long>(__cplusplus);
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  j["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
#ifdef NDEBUG
  j["build"] = "release";
#else
  j["build"] = "debug";
#endif
#if defined(__linux__)
  j["platform"] = "linux";
#elif defined(__APPLE__)
  j["platform"] = "darwin";
#else
  j["platform"] = "other";
#endif
  j["hardware_threads"] = std::thread::hardware_concurrency();
  j["rng"] = "mt19937_64";
  return j;
}

json make_manifest(const std::string& command, const json& config, const std::vector<std::string>& outputs) {
  return {{"command", command}, {"config", config}, {"outputs", outputs}, {"environment", environment_fingerprint()}};
}

std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path rel(name);
  if (rel.empty() || rel.is_absolute() || rel.has_parent_path()) {
    fail("unwritable_output", "output name '" + name + "' must be a plain file name");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail("unwritable_output", "cannot create output directory '" + dir.string() + "': " + ec.message());
  const fs::path full = dir / rel;
  std::ofstream out(full, std::ios::binary);
  if (!out) fail("unwritable_output", "cannot open '" + full.string() + "' for writing");
  out << content;
  out.close();
  if (!out) fail("unwritable_output", "write to '" + full.string() + "' failed");
  return full;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

}  // namespace sgdsat
