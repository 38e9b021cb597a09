#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgdsat/audits.hpp"
#include "sgdsat/config.hpp"
#include "sgdsat/error.hpp"
#include "sgdsat/harness.hpp"
#include "sgdsat/instances.hpp"
#include "sgdsat/moments.hpp"
#include "sgdsat/report.hpp"
#include "sgdsat/solvers.hpp"
#include "sgdsat/testproblems.hpp"
#include "sgdsat/theorybounds.hpp"

namespace py = pybind11;
using namespace sgdsat;

namespace {

py::dict trajectory_dict(const Trajectory& t) {
  std::vector<long long> it;
  std::vector<double> ep, se, rs;
  for (const auto& c : t.checkpoints) {
    it.push_back(c.iter);
    ep.push_back(c.epoch);
    se.push_back(c.sq_error);
    rs.push_back(c.residual);
  }
  py::dict d;
  d["iter"] = it;
  d["epoch"] = ep;
  d["sq_error"] = se;
  d["residual"] = rs;
  d["seed"] = t.seed;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Core routines of the sgdsat library";

  static py::handle exc = py::exception<Error>(m, "SgdsatError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(exc, (e.code() + ": " + e.what()).c_str());
    }
  });

  py::class_<Checkpoint>(m, "Checkpoint")
      .def_readonly("iter", &Checkpoint::iter)
      .def_readonly("epoch", &Checkpoint::epoch)
      .def_readonly("sq_error", &Checkpoint::sq_error)
      .def_readonly("residual", &Checkpoint::residual);

  py::class_<InverseInstance>(m, "InverseInstance")
      .def_readonly("A", &InverseInstance::A)
      .def_readonly("x1", &InverseInstance::x1)
      .def_readonly("x_dag", &InverseInstance::x_dag)
      .def_readonly("y_dag", &InverseInstance::y_dag)
      .def_readonly("y_delta", &InverseInstance::y_delta)
      .def_readonly("nu", &InverseInstance::nu)
      .def_readonly("eps", &InverseInstance::eps)
      .def_readonly("delta", &InverseInstance::delta)
      .def_readonly("w_norm", &InverseInstance::w_norm)
      .def_property_readonly("n", &InverseInstance::n)
      .def_property_readonly("m", &InverseInstance::m);

  m.def(
      "make_problem",
      [](const std::string& name, int n) {
        const TestProblem p = make_problem(name, n);
        py::dict d;
        d["name"] = problem_name(p.kind);
        d["A"] = p.A;
        d["x_e"] = p.x_e;
        d["grid"] = p.grid;
        return d;
      },
      py::arg("name"), py::arg("n"));

  m.def(
      "make_instance",
      [](const std::string& name, int n, double nu, double eps, std::uint64_t noise_seed) {
        return make_instance(make_problem(name, n), nu, eps, noise_seed);
      },
      py::arg("problem"), py::arg("n"), py::arg("nu"), py::arg("eps"), py::arg("noise_seed") = 2024);

  m.def("precondition_instance", &precondition_instance, py::arg("instance"));

  m.def(
      "admissible_c0",
      [](const Matrix& A, double alpha) {
        const StepsizeReport r = admissible_c0(A, alpha);
        py::dict d;
        d["c0_max"] = r.c0_max;
        d["row_bound"] = r.row_bound;
        d["spectral_bound"] = r.spectral_bound;
        d["b_norm"] = r.b_norm;
        return d;
      },
      py::arg("A"), py::arg("alpha") = 0.0);

  m.def("resolve_c0", &resolve_c0, py::arg("expr"), py::arg("c"), py::arg("n"));

  m.def(
      "sgd_run",
      [](const InverseInstance& inst, double c0, double alpha, double max_epochs, std::uint64_t seed,
         bool override_admissibility) {
        SgdOptions o;
        o.override_admissibility = override_admissibility;
        return trajectory_dict(sgd_run(inst, {c0, alpha}, max_epochs, seed, o));
      },
      py::arg("instance"), py::arg("c0"), py::arg("alpha") = 0.0, py::arg("max_epochs") = 10.0,
      py::arg("seed") = 1, py::arg("override_admissibility") = false);

  m.def(
      "landweber_run",
      [](const InverseInstance& inst, double eta, long long max_iters) {
        return trajectory_dict(landweber_run(inst, eta, max_iters));
      },
      py::arg("instance"), py::arg("eta"), py::arg("max_iters"));

  m.def("landweber_default_eta", &landweber_default_eta, py::arg("A"));

  py::class_<MomentOracle>(m, "MomentOracle")
      .def(py::init<const InverseInstance&>(), py::arg("instance"))
      .def(
          "mse_at",
          [](const MomentOracle& o, const InverseInstance& inst, double c0, double alpha,
             const std::vector<long long>& iters) {
            return o.mse_at(init_moments(inst.x1, inst.x_dag), {c0, alpha}, iters);
          },
          py::arg("instance"), py::arg("c0"), py::arg("alpha"), py::arg("iters"))
      .def_property_readonly("B", &MomentOracle::B);

  m.def(
      "decomposition_terms",
      [](const InverseInstance& inst, double c0, double alpha, int k, int ell) {
        const DecompositionReport r = decomposition_terms(inst, {c0, alpha}, k, ell);
        py::dict d;
        d["terms_apx"] = r.terms_apx;
        d["terms_ppg"] = r.terms_ppg;
        d["tail"] = r.tail;
        d["rhs_total"] = r.rhs_total;
        d["lhs_exact"] = r.lhs_exact;
        d["slack"] = r.slack;
        return d;
      },
      py::arg("instance"), py::arg("c0"), py::arg("alpha"), py::arg("k"), py::arg("ell"));

  m.def(
      "assumption3_violation_witness",
      [](const Matrix& A) -> py::object {
        const WitnessResult w = assumption3_violation_witness(A);
        if (!w.witness) return py::none();
        py::dict d;
        d["j"] = w.witness->j;
        d["l"] = w.witness->l;
        d["e"] = w.witness->e;
        d["lhs"] = w.witness->lhs;
        d["rhs"] = w.witness->rhs;
        return d;
      },
      py::arg("A"));

  m.def(
      "run_audits_json",
      [](const std::string& suite, const std::string& options) {
        const auto j = nlohmann::json::parse(options);
        AuditOptions o;
        if (j.contains("max_k")) o.max_k = j.at("max_k").get<int>();
        if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("decomposition_configs")) o.decomposition_configs = j.at("decomposition_configs").get<int>();
        if (j.contains("kernel_configs")) o.kernel_configs = j.at("kernel_configs").get<int>();
        if (j.contains("witness_matrices")) o.witness_matrices = j.at("witness_matrices").get<int>();
        py::gil_scoped_release release;
        return run_audits(suite, o).to_json().dump();
      },
      py::arg("suite"), py::arg("options") = "{}");

  m.def(
      "run_comparison_json",
      [](const std::string& config, bool override_admissibility) {
        const ExperimentConfig cfg = parse_config(nlohmann::json::parse(config));
        py::gil_scoped_release release;
        return summaries_to_json(run_comparison(cfg, override_admissibility)).dump();
      },
      py::arg("config"), py::arg("override_admissibility") = false);
}
