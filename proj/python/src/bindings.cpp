#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fracvi/cli.hpp"
#include "fracvi/errors.hpp"
#include "fracvi/penalized.hpp"
#include "fracvi/primal_dual.hpp"
#include "fracvi/problem_file.hpp"
#include "fracvi/riesz.hpp"

namespace py = pybind11;
using namespace fracvi;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<py::ssize_t> field_shape(const Grid& g) { return std::vector<py::ssize_t>(g.dim(), g.n()); }

// Fields cross the boundary as arrays of shape (n,) or (n, n) in flat node order.
ScalarField to_field(const Grid& g, const Array& a) {
  if (static_cast<std::size_t>(a.size()) != g.size()) throw ValidationError("array size does not match the grid");
  return ScalarField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const ScalarField& f) {
  Array out(field_shape(f.grid()));
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

Array to_array(const VectorField& F) {
  std::vector<py::ssize_t> shape = field_shape(F.grid());
  shape.insert(shape.begin(), F.dim());
  Array out(shape);
  double* p = out.mutable_data();
  for (int j = 0; j < F.dim(); ++j) p = std::copy(F.component_data(j).begin(), F.component_data(j).end(), p);
  return out;
}

VectorField to_vector_field(const Grid& g, const Array& a) {
  if (static_cast<std::size_t>(a.size()) != g.size() * g.dim())
    throw ValidationError("array size does not match dim x grid");
  std::vector<std::vector<double>> comps(g.dim());
  for (int j = 0; j < g.dim(); ++j) comps[j].assign(a.data() + j * g.size(), a.data() + (j + 1) * g.size());
  return VectorField(g, std::move(comps));
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["solver"] = r.solver;
  d["sigma"] = r.sigma;
  d["u"] = to_array(r.u);
  d["lambda"] = to_array(r.lambda_eps);
  d["gamma"] = to_array(r.gamma);
  d["eps_final"] = r.eps_final;
  d["converged"] = r.converged;
  d["constraint_violation_sup"] = r.constraint_violation_sup;
  d["complementarity_abs"] = r.complementarity_abs;
  d["lambda_l1"] = r.lambda_norms.l1;
  d["total_iterations"] = r.total_iterations;
  py::dict checks;
  for (const auto& c : r.checks) checks[py::str(c.name)] = py::make_tuple(c.lhs, c.rhs, c.passed);
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fracvi, m) {
  m.doc() = "Spectral solvers for fractional-gradient-constrained variational inequalities";

  // translators run newest first, so the base class goes first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);

  py::class_<Grid>(m, "Grid")
      .def(py::init(&make_grid), py::arg("dim"), py::arg("n"), py::arg("half_length"))
      .def_property_readonly("dim", &Grid::dim)
      .def_property_readonly("n", &Grid::n)
      .def_property_readonly("half_length", &Grid::half_length)
      .def_property_readonly("spacing", &Grid::spacing)
      .def("coordinates", [](const Grid& g) {
        std::vector<double> x(g.n());
        for (int i = 0; i < g.n(); ++i) x[i] = g.coordinate(i);
        return Array(static_cast<py::ssize_t>(x.size()), x.data());
      });

  m.def(
      "frac_gradient", [](const Grid& g, const Array& u, double sigma) { return to_array(frac_gradient(to_field(g, u), sigma)); },
      py::arg("grid"), py::arg("u"), py::arg("sigma"));
  m.def(
      "frac_divergence",
      [](const Grid& g, const Array& F, double sigma) { return to_array(frac_divergence(to_vector_field(g, F), sigma)); },
      py::arg("grid"), py::arg("F"), py::arg("sigma"));
  m.def(
      "frac_laplacian", [](const Grid& g, const Array& u, double sigma) { return to_array(frac_laplacian(to_field(g, u), sigma)); },
      py::arg("grid"), py::arg("u"), py::arg("sigma"));
  m.def(
      "riesz_potential",
      [](const Grid& g, const Array& h, double alpha, const std::string& backend) {
        RieszBackend b;
        if (backend == "spectral")
          b = RieszBackend::spectral;
        else if (backend == "quadrature")
          b = RieszBackend::quadrature;
        else
          throw ValidationError("backend must be 'spectral' or 'quadrature'");
        return to_array(riesz_potential(to_field(g, h), alpha, b).field);
      },
      py::arg("grid"), py::arg("h"), py::arg("alpha"), py::arg("backend") = "spectral");
  m.def("penalty_k", &penalty_k, py::arg("t"), py::arg("eps"));

  py::class_<ProblemFile>(m, "Problem")
      .def_property_readonly("grid", [](const ProblemFile& p) { return p.spec.grid; })
      .def_property_readonly("sigma", [](const ProblemFile& p) { return p.spec.sigma.value(); })
      .def_property_readonly("symmetric", [](const ProblemFile& p) { return p.spec.coeffs.symmetric(); })
      .def_property_readonly("eps_final", [](const ProblemFile& p) { return p.schedule.eps_final(); })
      .def_property_readonly("inside", [](const ProblemFile& p) {
        ScalarField ind = indicator_field(p.spec.mask);
        return to_array(ind);
      });

  m.def(
      "load_problem",
      [](const std::filesystem::path& path, const std::vector<std::string>& overrides) {
        return parse_problem(path, overrides);
      },
      py::arg("path"), py::arg("overrides") = std::vector<std::string>{});
  m.def(
      "solve",
      [](const ProblemFile& p, const std::string& method) {
        if (method != "penalized" && method != "primal_dual")
          throw ValidationError("method must be 'penalized' or 'primal_dual'");
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = method == "penalized" ? solve_penalized(p.spec, p.schedule) : solve_primal_dual(p.spec, p.primal_dual);
        }
        return report_dict(r);
      },
      py::arg("problem"), py::arg("method") = "penalized");
  m.def(
      "run",
      [](const std::filesystem::path& problem, const std::string& command, const std::filesystem::path& out,
         const std::vector<std::string>& overrides, std::uint64_t seed) {
        RunConfig cfg;
        cfg.problem = problem;
        cfg.command = parse_command(command);
        cfg.out = out;
        cfg.overrides = overrides;
        cfg.seed = seed;
        std::ostringstream log;
        int code;
        {
          py::gil_scoped_release release;
          code = fracvi::run(cfg, log);
        }
        return py::make_tuple(code, log.str());
      },
      py::arg("problem"), py::arg("command"), py::arg("out"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("seed") = 1);
}
