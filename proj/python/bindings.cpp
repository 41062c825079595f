#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "vbsbl/fastupdate.hpp"
#include "vbsbl/inference.hpp"
#include "vbsbl/metrics.hpp"
#include "vbsbl/model.hpp"
#include "vbsbl/version.hpp"

namespace py = pybind11;
using namespace vbsbl;

namespace {

/// Posterior exposed to Python with complex arrays for both fields.
struct PyPosterior {
  std::vector<double> gamma;
  double lambda = 1.0;
  Eigen::VectorXcd x_hat;
  std::vector<Index> active_blocks;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> objective_trace;
};

template <class Scalar>
PyPosterior to_python(const PosteriorState<Scalar>& s) {
  return {s.gamma, s.lambda, s.x_hat.template cast<Complex>(), s.active_blocks, s.iterations, s.objective,
          s.converged, s.objective_trace};
}

Hyperprior prior_from(const std::string& name, std::optional<double> a, std::optional<double> b,
                      std::optional<double> c) {
  return make_prior(name, a, b, c);
}

SolverConfig config_from(int max_iterations, double tol, std::optional<double> noise_precision) {
  SolverConfig config;
  config.max_iterations = max_iterations;
  config.objective_rel_tol = tol;
  config.fixed_noise_precision = noise_precision;
  validate_config(config);
  return config;
}

template <class Scalar>
ProblemInstance<Scalar> instance_from(const Vec<Scalar>& y, const Mat<Scalar>& phi, const std::vector<Index>& sizes) {
  return validate_instance<Scalar>({y, phi, sizes, {}});
}

/// Dispatches on the dtype of y/phi: complex if either is complex.
template <bool Fast>
PyPosterior solve(const py::array& y, const py::array& phi, const std::vector<Index>& block_sizes,
                  const std::string& prior, std::optional<double> a, std::optional<double> b, std::optional<double> c,
                  int max_iterations, double tol, std::optional<double> noise_precision) {
  const auto p = prior_from(prior, a, b, c);
  const auto config = config_from(max_iterations, tol, noise_precision);
  const bool complex = py::isinstance<py::array_t<Complex>>(y) || py::isinstance<py::array_t<Complex>>(phi) ||
                       y.dtype().kind() == 'c' || phi.dtype().kind() == 'c';
  if (complex) {
    const auto inst = instance_from<Complex>(y.cast<Vec<Complex>>(), phi.cast<Mat<Complex>>(), block_sizes);
    py::gil_scoped_release release;
    return to_python(Fast ? fast_solve(inst, p, config) : slow_solve(inst, p, config));
  }
  const auto inst = instance_from<Real>(y.cast<Vec<Real>>(), phi.cast<Mat<Real>>(), block_sizes);
  py::gil_scoped_release release;
  return to_python(Fast ? fast_solve(inst, p, config) : slow_solve(inst, p, config));
}

BlockLocalData local_from(const Eigen::VectorXd& s, const Eigen::VectorXd& q, double rho) {
  return make_local_data(s, q, rho);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fast variational block-sparse Bayesian learning";
  m.attr("__version__") = std::string(version());

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<PyPosterior>(m, "Posterior")
      .def_readonly("gamma", &PyPosterior::gamma)
      .def_readonly("noise_precision", &PyPosterior::lambda)
      .def_readonly("x_hat", &PyPosterior::x_hat)
      .def_readonly("active_blocks", &PyPosterior::active_blocks)
      .def_readonly("iterations", &PyPosterior::iterations)
      .def_readonly("objective", &PyPosterior::objective)
      .def_readonly("converged", &PyPosterior::converged)
      .def_readonly("objective_trace", &PyPosterior::objective_trace);

  py::class_<FixedPointResult>(m, "FixedPoint")
      .def_readonly("roots", &FixedPointResult::roots)
      .def_readonly("stability", &FixedPointResult::stability)
      .def_readonly("retained", &FixedPointResult::retained)
      .def_readonly("limit", &FixedPointResult::limit)
      .def_property_readonly("branch", [](const FixedPointResult& r) { return std::string(to_string(r.branch)); });

  const auto solve_args = [] {
    return std::make_tuple(py::arg("y"), py::arg("phi"), py::arg("block_sizes"), py::arg("prior") = "jeffreys",
                           py::arg("a") = py::none(), py::arg("b") = py::none(), py::arg("c") = py::none(),
                           py::arg("max_iterations") = 200, py::arg("tol") = 1e-6,
                           py::arg("noise_precision") = py::none());
  };
  std::apply([&](auto... args) { m.def("fast_solve", &solve<true>, "Fast solver (fixed-point limits).", args...); },
             solve_args());
  std::apply([&](auto... args) { m.def("slow_solve", &solve<false>, "Classic variational updates.", args...); },
             solve_args());

  m.def(
      "fixed_point_limit",
      [](const Eigen::VectorXd& s, const Eigen::VectorXd& q, double gamma0, const std::string& prior,
         std::optional<double> a, std::optional<double> b, std::optional<double> c, double rho, double chi) {
        return theorem1_limit(prior_from(prior, a, b, c), local_from(s, q, rho), gamma0, chi);
      },
      "Limit of the single-block alternating updates from gamma0.", py::arg("s"), py::arg("q"),
      py::arg("gamma0") = 0.0, py::arg("prior") = "jeffreys", py::arg("a") = py::none(), py::arg("b") = py::none(),
      py::arg("c") = py::none(), py::arg("rho") = 0.5, py::arg("chi") = 1.0);
  m.def(
      "h_eval", [](const Eigen::VectorXd& s, const Eigen::VectorXd& q, double gamma,
                   double rho) { return h_eval(local_from(s, q, rho), gamma); },
      py::arg("s"), py::arg("q"), py::arg("gamma"), py::arg("rho") = 0.5);
  m.def(
      "f_eval",
      [](const Eigen::VectorXd& s, const Eigen::VectorXd& q, double gamma, const std::string& prior,
         std::optional<double> a, std::optional<double> b, std::optional<double> c, double rho) {
        return f_eval(prior_from(prior, a, b, c), local_from(s, q, rho), gamma);
      },
      py::arg("s"), py::arg("q"), py::arg("gamma"), py::arg("prior") = "jeffreys", py::arg("a") = py::none(),
      py::arg("b") = py::none(), py::arg("c") = py::none(), py::arg("rho") = 0.5);
  m.def(
      "nmse", [](const Eigen::VectorXcd& x, const Eigen::VectorXcd& x_hat) { return nmse<Complex>(x, x_hat); },
      py::arg("x_true"), py::arg("x_hat"));
  m.def("ospa", &ospa, py::arg("estimate"), py::arg("truth"), py::arg("cutoff") = 5.0, py::arg("order") = 1.0);
}
