// Matrices cross the boundary as nested lists of rational strings ("p/q").
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flagforge/finoracle.hpp"
#include "flagforge/session.hpp"

namespace py = pybind11;
using namespace flagforge;

namespace {

using Rows = std::vector<std::vector<std::string>>;

Matrix to_matrix(const Rows& rows, std::size_t n) {
  json j = json::array();
  for (const auto& r : rows) j.push_back(r);
  return matrix_from_json(j, n);
}

Rows from_matrix(const Matrix& m) {
  Rows out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i].push_back(rational_to_json(m(i, j)).get<std::string>());
  return out;
}

std::vector<Rows> basis_of(const MatSpace& s) {
  std::vector<Rows> out;
  for (const auto& b : s.basis()) out.push_back(from_matrix(b));
  return out;
}

FdLieAlgebra algebra(std::size_t n, const std::vector<Rows>& gens) {
  std::vector<Matrix> ms;
  for (const auto& g : gens) ms.push_back(to_matrix(g, n));
  return lie_close(n, ms);
}

using AlgebraOp = FdLieAlgebra (*)(const FdLieAlgebra&);

void def_algebra_op(py::module_& m, const char* name, AlgebraOp op, const char* doc) {
  m.def(
      name, [op](std::size_t n, const std::vector<Rows>& gens) { return basis_of(op(algebra(n, gens))); },
      py::arg("n"), py::arg("generators"), doc);
}

}  // namespace

PYBIND11_MODULE(_flagforge, m) {
  m.doc() = "Exact structure computations for finitary Lie algebras";

  static py::exception<Error> domain_error(m, "DomainError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(domain_error.ptr(), (e.kind() + ": " + e.detail()).c_str());
    } catch (const SessionInputError& e) {
      PyErr_SetString(PyExc_ValueError, e.error().to_json().dump().c_str());
    }
  });

  m.def(
      "run_session",
      [](const std::string& text, std::uint64_t seed, bool parallel) {
        RunOptions o;
        o.seed = seed;
        o.parallel = parallel;
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_session_text(text, o);
        }
        return py::make_tuple(r.exit_code, r.report.dump());
      },
      py::arg("text"), py::arg("seed") = kDefaultSeed, py::arg("parallel") = false,
      "Run a session given as JSON text; returns (exit_code, report_json).");
  m.def(
      "emit",
      [](const std::string& text) {
        try {
          return emit_objects(load_session_text(text)).dump();
        } catch (const SessionInputError& e) {
          throw py::value_error(e.error().to_json().dump());
        }
      },
      py::arg("text"), "Every object of a session in definition form, as JSON text.");

  m.def(
      "jordan_chevalley",
      [](const Rows& x) {
        JordanChevalley jc = jordan_chevalley(to_matrix(x, x.size()));
        return py::make_tuple(from_matrix(jc.ss), from_matrix(jc.nil));
      },
      py::arg("matrix"));
  m.def(
      "minimal_polynomial",
      [](const Rows& x) {
        const Poly p = minimal_polynomial(to_matrix(x, x.size()));
        std::vector<std::string> out;
        for (const auto& c : p.coeffs())
          out.push_back(rational_to_json(c).get<std::string>());
        return out;
      },
      py::arg("matrix"), "Coefficients, constant term first.");

  m.def(
      "lie_closure", [](std::size_t n, const std::vector<Rows>& gens) { return basis_of(algebra(n, gens)); },
      py::arg("n"), py::arg("generators"));
  def_algebra_op(m, "solvable_radical", solvable_radical, "Basis of the solvable radical.");
  def_algebra_op(m, "linear_nilradical", linear_nilradical, "Basis of the largest ideal of nilpotent matrices.");
  def_algebra_op(m, "levi_component", levi_component, "Basis of a Levi component.");
  def_algebra_op(m, "derived", derived, "Basis of [g, g].");
  def_algebra_op(m, "splittable_closure", splittable_closure, "Basis of the splittable hull.");
}
