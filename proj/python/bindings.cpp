// Thin Python wrapper. Enum arguments are passed by their CLI names.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "microlimit/charpoly.hpp"
#include "microlimit/counts.hpp"
#include "microlimit/ensembles.hpp"
#include "microlimit/kernels.hpp"
#include "microlimit/stats.hpp"

namespace py = pybind11;
using namespace microlimit;

namespace {

py::dict spectrum_dict(const Spectrum& sp) {
  py::dict d;
  d["ensemble"] = to_string(sp.ensemble);
  d["n"] = sp.n;
  d["seed"] = sp.seed;
  if (sp.is_compact()) {
    d["angles"] = sp.angles;
    d["halfangles"] = sp.halfangles;
  } else {
    d["levels"] = sp.levels;
  }
  return d;
}

py::dict summary_dict(const CountSummary& s) {
  py::dict d;
  d["mean"] = s.mean;
  d["variance"] = s.variance;
  d["stderrmean"] = s.stderrmean;
  d["stderrvar"] = s.stderrvar;
  d["replicas"] = s.replicas;
  return d;
}

py::dict slope_dict(const SlopeFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["lo95"] = f.lo95;
  d["hi95"] = f.hi95;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Eigenvalue statistics and characteristic polynomials of classical random matrix ensembles";
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<DegenerateSample>(m, "DegenerateSample", PyExc_ArithmeticError);

  m.def("kernel_eval", [](const std::string& family, int size, double x, double y) {
    return kernel_eval(KernelSpec(parse_kernel_family(family), size), x, y);
  }, py::arg("family"), py::arg("size"), py::arg("x"), py::arg("y"));

  m.def("semicircle_density", &semicircle_density, py::arg("x"));
  m.def("stieltjes_pv", &stieltjes_pv, py::arg("E"));

  m.def("sample_spectrum", [](const std::string& ensemble, int n, std::uint64_t seed, bool tridiagonal) {
    return spectrum_dict(sample_spectrum(parse_ensemble(ensemble), n, seed, tridiagonal));
  }, py::arg("ensemble"), py::arg("n"), py::arg("seed"), py::arg("tridiagonal") = false);

  m.def("expected_count", [](const std::string& family, int size, double a, double b) {
    return expected_count_quadrature(KernelSpec(parse_kernel_family(family), size), Interval(a, b));
  }, py::arg("family"), py::arg("size"), py::arg("a"), py::arg("b"));

  m.def("count_variance", [](const std::string& family, int size, double a, double b) {
    return variance_count_quadrature(KernelSpec(parse_kernel_family(family), size), Interval(a, b));
  }, py::arg("family"), py::arg("size"), py::arg("a"), py::arg("b"));

  m.def("xi", [](const std::string& ensemble, int n, std::uint64_t seed, double energy, std::vector<cplx> svalues) {
    const Ensemble e = parse_ensemble(ensemble);
    const auto sp = sample_spectrum(e, n, seed);
    const auto p = CharPolyParams::make(e, energy);
    std::vector<cplx> out;
    for (cplx s : svalues) out.push_back(xi_eval(sp, p, s));
    return out;
  }, py::arg("ensemble"), py::arg("n"), py::arg("seed"), py::arg("energy"), py::arg("s"));

  m.def("ks_two_sample", [](std::vector<double> a, std::vector<double> b) {
    const auto r = ks_two_sample(std::move(a), std::move(b));
    return py::make_tuple(r.statistic, r.pvalue);
  }, py::arg("a"), py::arg("b"));

  m.def("audit", [](const std::string& ensemble, int n, double energy, std::vector<double> lengths, int m,
                    std::uint64_t seed, int workers) {
    const auto rep = amenability_audit(parse_ensemble(ensemble), n, energy, lengths, m, seed, workers);
    py::dict d;
    d["meanslope"] = slope_dict(rep.meanslope);
    d["varslope"] = slope_dict(rep.varslope);
    d["symmetryslope"] = slope_dict(rep.symmetryslope);
    py::list rows;
    for (const auto& r : rep.rows) {
      py::dict row;
      row["length"] = r.length;
      row["plus"] = summary_dict(r.plus);
      row["minus"] = summary_dict(r.minus);
      row["symmetrydefect"] = r.symmetrydefect;
      rows.append(row);
    }
    d["rows"] = rows;
    d["verdict"] = rep.pass() ? "PASS" : "FAIL";
    return d;
  }, py::arg("ensemble"), py::arg("n"), py::arg("energy"), py::arg("lengths"), py::arg("m"), py::arg("seed"),
     py::arg("workers") = 1);
}
