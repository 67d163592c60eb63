#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "matlog/analysis.hpp"
#include "matlog/bench.hpp"
#include "matlog/data_io.hpp"
#include "matlog/front.hpp"
#include "matlog/solver.hpp"

namespace py = pybind11;
using namespace matlog;

namespace {

py::array_t<bool> to_numpy(const BitMatrix& m) {
  const auto n = static_cast<py::ssize_t>(m.size());
  py::array_t<bool> out({n, n});
  auto v = out.mutable_unchecked<2>();
  for (py::ssize_t i = 0; i < n; ++i)
    for (py::ssize_t j = 0; j < n; ++j) v(i, j) = m.get(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return out;
}

BitMatrix from_numpy(const py::array_t<bool, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw std::invalid_argument("expected a square 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  auto v = a.unchecked<2>();
  BitMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (v(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j))) m.set(i, j);
  return m;
}

FactSet facts_of(const std::string& text, const std::string& format, const std::string& predicate) {
  return text.empty() ? FactSet{} : parse_facts(text, parse_fact_format(format), predicate);
}

py::dict solve(const std::string& program, const std::string& facts, const std::string& format,
               const std::string& predicate, const std::string& method, bool builtin_diag,
               std::optional<double> tau) {
  SolveOptions options;
  options.method = parse_method(method);
  options.tau = tau;
  const Model model = evaluate_program(parse_program(program), facts_of(facts, format, predicate), options, builtin_diag);
  py::dict relations;
  for (const auto& [name, m] : model.relations) relations[py::str(name)] = to_numpy(m);
  py::list layers;
  for (const auto& r : model.layers) {
    py::dict d;
    d["predicates"] = r.predicates;
    d["class"] = std::string(to_string(r.cls));
    d["method"] = std::string(to_string(r.used));
    d["iterations"] = r.iterations;
    d["epsilons"] = r.epsilons;
    d["fallbacks"] = r.fallbacks;
    layers.append(d);
  }
  py::dict out;
  out["constants"] = model.constants.names();
  out["relations"] = relations;
  out["layers"] = layers;
  out["model"] = render_model(model.relations, model.constants);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Least models of linear binary Datalog programs by matrix equations";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<EpsilonError>(m, "EpsilonError", PyExc_ValueError);

  m.def(
      "validate",
      [](const std::string& program) {
        const Program p = parse_program(program);
        const auto report = validate_clin(p);
        return py::make_tuple(report.ok, format_validation(p, report));
      },
      py::arg("program"));

  m.def(
      "classify",
      [](const std::string& program) {
        const Program p = parse_program(program);
        py::list out;
        for (const auto& layer : analyze(p).layers) {
          std::vector<std::string> preds;
          for (PredicateId q : layer.scc) preds.push_back(p.predicates.name(q));
          out.append(py::make_tuple(preds, std::string(to_string(layer.cls))));
        }
        return out;
      },
      py::arg("program"));

  m.def("solve", &solve, py::arg("program"), py::arg("facts") = "", py::arg("format") = "atoms",
        py::arg("predicate") = "r1", py::arg("method") = "auto", py::arg("builtin_diag") = false,
        py::arg("tau") = py::none());

  m.def(
      "solve_matrix",
      [](const std::string& program, const py::array_t<bool, py::array::c_style | py::array::forcecast>& r1,
         const std::string& method, bool builtin_diag) {
        SolveOptions options;
        options.method = parse_method(method);
        const Model model = evaluate_program(parse_program(program), facts_from_matrix(from_numpy(r1), "r1"), options,
                                             builtin_diag);
        py::dict out;
        for (const auto& [name, mat] : model.relations) out[py::str(name)] = to_numpy(mat);
        return out;
      },
      py::arg("program"), py::arg("r1"), py::arg("method") = "auto", py::arg("builtin_diag") = false);

  m.def(
      "random_adjacency",
      [](std::size_t n, double p_e, std::uint64_t seed) { return to_numpy(random_adjacency({n, p_e, seed})); },
      py::arg("n"), py::arg("p_e"), py::arg("seed") = 0);

  m.def(
      "compare",
      [](const std::string& program, const std::string& facts, const std::string& format, bool builtin_diag) {
        const CompareReport r = compare_methods(parse_program(program), facts_of(facts, format, "r1"), {}, builtin_diag);
        return py::make_tuple(r.ok(), format_compare(r));
      },
      py::arg("program"), py::arg("facts") = "", py::arg("format") = "atoms", py::arg("builtin_diag") = false);

  m.attr("TRCL") = std::string(trcl_source());
  m.attr("SGEN") = std::string(sgen_source());
}
