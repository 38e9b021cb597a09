#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgdsat/harness.hpp"
#include "sgdsat/testproblems.hpp"

namespace sgdsat {

/// Fixed 6-significant-digit CSV number ("nan" for NaN).
std::string csv_number(double v);

/// Header nu,eps,c0,alpha,e_sgd,k_sgd,e_lm,k_lm,stderr,slope then one row per summary.
std::string summaries_csv(const std::vector<RunSummary>& rows);

nlohmann::json summary_to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);
nlohmann::json summaries_to_json(const std::vector<RunSummary>& rows);
std::vector<RunSummary> summaries_from_json(const nlohmann::json& j);

/// epoch,mean_sq_error,stderr for SGD and iter,sq_error for Landweber.
std::string sgd_trace_csv(const CellTrace& t);
std::string landweber_trace_csv(const CellTrace& t);

/// Header "name,n,m", then the n matrix rows, then x_e as the last row.
/// Entries use 17 significant digits, so the bytes are deterministic.
std::string problem_csv(const TestProblem& p);

/// Compiler, library versions, build type, platform and thread count.
nlohmann::json environment_fingerprint();

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<std::string>& outputs);

/// Writes `name` inside `dir` (created if missing). Names that would escape
/// the directory are rejected; write failures raise Error("unwritable_output").
std::filesystem::path write_output(const std::filesystem::path& dir, const std::string& name,
                                   const std::string& content);

/// Two-space indented JSON with a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace sgdsat
