#include "sgdsat/instances.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "sgdsat/error.hpp"

namespace sgdsat {

namespace {

using nlohmann::json;

// V diag(f(sigma)) V^t x, the functional calculus of A^t A through the SVD.
Vector apply_gram_function(const Svd& s, const Vector& x, const std::function<double(double)>& f) {
  Vector coeff = s.V.transpose() * x;
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff(i) *= f(s.sigma(i));
  return s.V * coeff;
}

Vector true_solution_from_svd(const Svd& s, const Vector& x_e, double nu) {
  Vector x = nu == 0.0 ? x_e
                       : apply_gram_function(s, x_e, [nu](double sig) {
                           return sig > 0.0 ? std::pow(sig, 2.0 * nu) : 0.0;
                         });
  const double scale = x.cwiseAbs().maxCoeff();
  if (!(scale > 1e-300) || !std::isfinite(scale)) {
    fail("invalid_argument", "make_true_solution: (A^t A)^nu x_e is numerically zero");
  }
  return x / scale;
}

SourceElement source_from_svd(const Svd& s, double n, const Vector& diff, double nu) {
  SourceElement out;
  const double diff_norm = diff.norm();
  if (diff_norm == 0.0) {
    out.w = Vector::Zero(diff.size());
    return out;
  }
  if (nu == 0.0) {
    out.w = diff;
    out.w_norm = diff.norm();
    return out;
  }
  Vector lam(s.sigma.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::pow(s.sigma(i) * s.sigma(i) / n, nu);
  const double cutoff = 1e-12 * (lam.size() ? lam.maxCoeff() : 0.0);
  Vector coeff = s.V.transpose() * diff;
  Vector wc(coeff.size());
  Vector fitted(coeff.size());
  for (Eigen::Index i = 0; i < coeff.size(); ++i) {
    wc(i) = lam(i) > cutoff ? coeff(i) / lam(i) : 0.0;
    fitted(i) = lam(i) * wc(i);
  }
  out.w = s.V * wc;
  out.w_norm = out.w.norm();
  out.residual = (s.V * fitted - diff).norm();
  out.satisfied = out.residual <= 1e-6 * diff_norm;
  return out;
}

json vec_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vec_from_json(const json& a) {
  Vector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

}  // namespace

Vector make_true_solution(const Matrix& A, const Vector& x_e, double nu) {
  require(nu >= 0.0, "make_true_solution: nu must be >= 0");
  require(x_e.size() == A.cols(), "make_true_solution: x_e length must equal column count");
  if (nu == 0.0) return true_solution_from_svd(Svd{}, x_e, 0.0);
  return true_solution_from_svd(svd(A), x_e, nu);
}

Vector synthesize_from_source(const Matrix& A, const Vector& x1, double nu, const Vector& w) {
  require(nu >= 0.0, "synthesize_from_source: nu must be >= 0");
  require(x1.size() == A.cols() && w.size() == A.cols(), "synthesize_from_source: dimension mismatch");
  if (nu == 0.0) return x1 + w;
  const double n = static_cast<double>(A.rows());
  const Svd s = svd(A);
  return x1 + apply_gram_function(s, w, [n, nu](double sig) {
           return sig > 0.0 ? std::pow(sig * sig / n, nu) : 0.0;
         });
}

SourceElement source_element(const Matrix& A, const Vector& x1, const Vector& x_dag, double nu) {
  require(nu >= 0.0, "source_element: nu must be >= 0");
  require(x1.size() == A.cols() && x_dag.size() == A.cols(), "source_element: dimension mismatch");
  const Vector diff = x_dag - x1;
  if (diff.norm() == 0.0 || nu == 0.0) return source_from_svd(Svd{}, 1.0, diff, nu);
  return source_from_svd(svd(A), static_cast<double>(A.rows()), diff, nu);
}

NoisyData add_noise(const Vector& y_dag, double eps, std::uint64_t seed) {
  require(eps >= 0.0, "add_noise: eps must be >= 0");
  NoisyData out;
  out.xi = Vector::Zero(y_dag.size());
  if (eps > 0.0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = eps * y_dag.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < y_dag.size(); ++i) out.xi(i) = scale * normal(gen);
  }
  out.y_delta = y_dag + out.xi;
  out.xi = out.y_delta - y_dag;
  out.delta = out.xi.norm();
  return out;
}

Preconditioned precondition(const Matrix& A, const Vector& y) {
  require(y.size() == A.rows(), "precondition: y length must equal row count");
  const Svd s = svd(A, SvdMode::full);
  Preconditioned out;
  out.A_tilde = Matrix::Zero(A.rows(), A.cols());
  const Eigen::Index r = s.sigma.size();
  for (Eigen::Index i = 0; i < r; ++i) out.A_tilde.row(i) = s.sigma(i) * s.V.col(i).transpose();
  out.y_tilde = s.U.transpose() * y;
  out.U = s.U;
  return out;
}

InverseInstance precondition_instance(const InverseInstance& inst) {
  Preconditioned p = precondition(inst.A, inst.y_delta);
  InverseInstance out = inst;
  out.A = std::move(p.A_tilde);
  out.y_delta = std::move(p.y_tilde);
  out.y_dag = p.U.transpose() * inst.y_dag;
  out.xi = out.y_delta - out.y_dag;
  out.delta = out.xi.norm();
  return out;
}

InverseInstance make_instance(const TestProblem& problem, double nu, double eps, std::uint64_t noise_seed) {
  require(nu >= 0.0, "make_instance: nu must be >= 0");
  InverseInstance inst;
  inst.A = problem.A;
  inst.nu = nu;
  inst.eps = eps;
  inst.x1 = Vector::Zero(problem.m);
  const Svd s = svd(problem.A);
  inst.x_dag = true_solution_from_svd(s, problem.x_e, nu);
  inst.y_dag = inst.A * inst.x_dag;
  NoisyData noise = add_noise(inst.y_dag, eps, noise_seed);
  inst.y_delta = std::move(noise.y_delta);
  inst.xi = std::move(noise.xi);
  inst.delta = noise.delta;
  inst.w_norm = source_from_svd(s, problem.n, inst.x_dag - inst.x1, nu).w_norm;
  return inst;
}

InverseInstance make_source_instance(const Matrix& A, double nu, const Vector& w, double eps,
                                     std::uint64_t noise_seed) {
  InverseInstance inst;
  inst.A = A;
  inst.nu = nu;
  inst.eps = eps;
  inst.x1 = Vector::Zero(A.cols());
  inst.x_dag = synthesize_from_source(A, inst.x1, nu, w);
  inst.y_dag = A * inst.x_dag;
  NoisyData noise = add_noise(inst.y_dag, eps, noise_seed);
  inst.y_delta = std::move(noise.y_delta);
  inst.xi = std::move(noise.xi);
  inst.delta = noise.delta;
  inst.w_norm = w.norm();
  return inst;
}

void write_matrix_csv(const Matrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("io", "cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", A(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) fail("io", "write failed for " + path);
}

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("io", "cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail("io", "ragged matrix CSV in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail("io", "empty matrix CSV in " + path);
  Matrix A(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) A(i, j) = rows[i][j];
  }
  return A;
}

void write_instance(const InverseInstance& inst, const std::string& json_path,
                    const std::string& matrix_csv_name) {
  namespace fs = std::filesystem;
  const fs::path base = fs::path(json_path).parent_path();
  write_matrix_csv(inst.A, (base / matrix_csv_name).string());
  json j;
  j["A"] = {{"path", matrix_csv_name}, {"rows", inst.A.rows()}, {"cols", inst.A.cols()}};
  j["x1"] = vec_to_json(inst.x1);
  j["x_dag"] = vec_to_json(inst.x_dag);
  j["nu"] = inst.nu;
  j["y_dag"] = vec_to_json(inst.y_dag);
  j["y_delta"] = vec_to_json(inst.y_delta);
  j["xi"] = vec_to_json(inst.xi);
  j["delta"] = inst.delta;
  j["eps"] = inst.eps;
  j["w_norm"] = inst.w_norm;
  std::ofstream out(json_path);
  if (!out) fail("io", "cannot write " + json_path);
  out << j.dump(2) << '\n';
}

InverseInstance read_instance(const std::string& json_path) {
  namespace fs = std::filesystem;
  std::ifstream in(json_path);
  if (!in) fail("io", "cannot read " + json_path);
  const json j = json::parse(in);
  InverseInstance inst;
  const fs::path matrix_path = fs::path(json_path).parent_path() / j.at("A").at("path").get<std::string>();
  inst.A = read_matrix_csv(matrix_path.string());
  inst.x1 = vec_from_json(j.at("x1"));
  inst.x_dag = vec_from_json(j.at("x_dag"));
  inst.nu = j.at("nu").get<double>();
  inst.y_dag = vec_from_json(j.at("y_dag"));
  inst.y_delta = vec_from_json(j.at("y_delta"));
  inst.xi = vec_from_json(j.at("xi"));
  inst.delta = j.at("delta").get<double>();
  inst.eps = j.at("eps").get<double>();
  inst.w_norm = j.at("w_norm").get<double>();
  return inst;
}

}  // namespace sgdsat
