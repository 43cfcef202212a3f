#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>

#include "spincharge/charge_profile.hpp"
#include "spincharge/cli.hpp"
#include "spincharge/experiments.hpp"
#include "spincharge/output.hpp"
#include "spincharge/soliton.hpp"
#include "spincharge/volterra.hpp"

namespace py = pybind11;
using namespace spincharge;

namespace {

using Arr3 = std::array<double, 3>;

Vec3 vec(const Arr3& a) { return Vec3(a[0], a[1], a[2]); }
Arr3 arr(const Vec3& v) { return {v[0], v[1], v[2]}; }

py::array_t<std::complex<double>> field_array(const std::vector<CVec3>& f, int n) {
  py::array_t<std::complex<double>> out({n, n, n, 3});
  auto m = out.mutable_unchecked<4>();
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l, ++idx)
        for (int c = 0; c < 3; ++c) m(i, j, l, c) = f[idx][c];
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral simulator for a rotating charge at rest in the Maxwell field";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DriftAbort>(m, "DriftAbort", PyExc_RuntimeError);

  py::class_<ChargeProfile>(m, "ChargeProfile")
      .def(py::init([](const std::string& kind, double support_radius, int quadrature_points) {
             return ChargeProfile(ProfileSpec{profile_kind_from_string(kind), support_radius, quadrature_points});
           }),
           py::arg("kind") = "charged", py::arg("support_radius") = 1.0, py::arg("quadrature_points") = 2048)
      .def_property_readonly("kind", [](const ChargeProfile& p) { return to_string(p.kind()); })
      .def_property_readonly("amplitude", &ChargeProfile::amplitude)
      .def_property_readonly("support_radius", &ChargeProfile::support_radius)
      .def_property_readonly("neutralizer", &ChargeProfile::neutralizer)
      .def_property_readonly("moment_of_inertia", &ChargeProfile::moment_of_inertia)
      .def_property_readonly("alpha", &ChargeProfile::alpha_rho)
      .def_property_readonly("total_charge", &ChargeProfile::total_charge)
      .def("rho", &ChargeProfile::eval_rho, py::arg("s"))
      .def("rho_hat", &ChargeProfile::radial_fourier, py::arg("r"))
      .def("rho_tilde", &ChargeProfile::rho_tilde, py::arg("r"))
      .def("__repr__", [](const ChargeProfile& p) {
        return "<ChargeProfile " + to_string(p.kind()) + ", R=" + std::to_string(p.support_radius()) + ">";
      });

  m.def(
      "soliton_energy",
      [](const ChargeProfile& p, const Arr3& omega) { return soliton_energy(Soliton(p, vec(omega))); },
      py::arg("profile"), py::arg("omega"));
  m.def(
      "K_vector", [](const ChargeProfile& p, const Arr3& omega) { return arr(K_vector(p, vec(omega))); },
      py::arg("profile"), py::arg("omega"));
  m.def("kappa_cos", &kappa_cos, py::arg("profile"), py::arg("tau"));
  m.def("kappa_sin", &kappa_sin, py::arg("profile"), py::arg("tau"));
  m.def("huygens_cutoff", &huygens_cutoff, py::arg("R"), py::arg("profile"));

  m.def(
      "instability_scan",
      [](const ChargeProfile& p, const Arr3& omega, double epsilon, const std::vector<double>& c_list) {
        const InstabilityReport r = instability_scan(p, vec(omega), epsilon, c_list);
        py::list pts;
        for (const InstabilityPoint& q : r.points)
          pts.append(py::dict(py::arg("c") = q.c, py::arg("norm") = q.norm, py::arg("delta_H") = q.delta_H,
                              py::arg("m3") = arr(q.m3)));
        return py::dict(py::arg("d") = r.d, py::arg("points") = pts, py::arg("slope_norm_e") = r.slope_norm_e,
                        py::arg("criterion_met") = r.criterion_met);
      },
      py::arg("profile"), py::arg("omega"), py::arg("epsilon"), py::arg("c_list"));

  m.def(
      "read_fst",
      [](const std::string& path) {
        const FieldState s = read_fst(path);
        return py::dict(py::arg("n_per_axis") = s.grid.n, py::arg("k_max") = s.grid.k_max, py::arg("time") = s.time,
                        py::arg("omega_pert") = arr(s.omega_pert), py::arg("e_hat") = field_array(s.e_hat, s.grid.n),
                        py::arg("b_hat") = field_array(s.b_hat, s.grid.n));
      },
      py::arg("path"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "spincharge");
        py::gil_scoped_release release;
        return run(args);
      },
      py::arg("args"), "Run a CLI subcommand in-process and return its exit code.");
}
