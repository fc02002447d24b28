#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <variant>

#include "stlc/cli.hpp"
#include "stlc/io.hpp"
#include "stlc/stlc.hpp"

namespace py = pybind11;
using namespace stlc;

namespace {

MuSpec mu_from(const std::variant<std::string, std::vector<double>>& mu) {
  if (const auto* name = std::get_if<std::string>(&mu)) return MuSpec::builtin(*name);
  return MuSpec::polynomial(std::get<std::vector<double>>(mu));
}

ModalState state_from(const Eigen::VectorXcd& c) { return ModalState(c); }

// Reports and configs cross the boundary as JSON text.
py::object report_obj(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json config_from(const py::object& cfg) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(cfg).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_stlc, m) {
  m.doc() = "Native core of the stlc toolkit";
  m.attr("__version__") = kVersion;

  static py::exception<Error> base(m, "StlcError");
  static py::exception<NoConvergence> no_conv(m, "NoConvergence", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoConvergence& e) {
      py::object hist = py::cast(e.history());
      no_conv.attr("history") = hist;
      PyErr_SetString(no_conv.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(base.ptr(), e.what());
    }
  });

  m.def("eigenvalues", [](int j_max) { return EigenBasis(j_max).lambdas(); }, py::arg("j_max"));

  m.def("bump_integral", &bump_integral);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init([](int j_max, const std::variant<std::string, std::vector<double>>& mu, double T, int n_steps,
                       const std::vector<int>& J, int p, int k) {
             return Scenario::make(j_max, mu_from(mu), T, n_steps, ProjectionSet(J, j_max), p, k);
           }),
           py::arg("j_max"), py::arg("mu"), py::arg("T"), py::arg("n_steps"), py::arg("J"), py::arg("p") = 0,
           py::arg("k") = 0)
      .def_property_readonly("j_max", &Scenario::j_max)
      .def_property_readonly("dipole_matrix", [](const Scenario& s) { return s.dipole.matrix; })
      .def_property_readonly("dipole_b", [](const Scenario& s) { return s.dipole.b; })
      .def_property_readonly("ordering_holds", [](const Scenario& s) { return s.ordering_holds; })
      .def("ground", [](const Scenario& s, double t) { return s.ground(t).coeffs; }, py::arg("t"))
      .def(
          "propagate",
          [](const Scenario& s, const Eigen::VectorXd& u, const Eigen::VectorXcd& psi0) {
            const ControlSignal sig = ControlSignal::from_samples(s.grid, u);
            py::gil_scoped_release release;
            return propagate_endpoint(s, sig, state_from(psi0)).coeffs;
          },
          py::arg("u"), py::arg("psi0"), "Endpoint psi(T) for control samples on the n_steps + 1 grid nodes.")
      .def(
          "random_task",
          [](const Scenario& s, double delta, std::uint64_t seed) {
            const ControlTask t = random_task(s, delta, seed);
            return py::make_tuple(t.psi0.coeffs, t.psif.coeffs);
          },
          py::arg("delta"), py::arg("seed"))
      .def(
          "nonlinear_control",
          [](const Scenario& s, const Eigen::VectorXcd& psi0, const Eigen::VectorXcd& psif, double delta) {
            SynthesisResult r = [&] {
              py::gil_scoped_release release;
              return nonlinear_control(s, ControlTask{state_from(psi0), state_from(psif), delta});
            }();
            return py::make_tuple(Eigen::VectorXd(r.u.samples()), report_obj(to_json(r.report)));
          },
          py::arg("psi0"), py::arg("psif"), py::arg("delta") = 1e-3);

  m.def(
      "solve_moments",
      [](const Eigen::VectorXcd& targets, int k, double T, int n_steps) {
        const TimeGrid grid(T, n_steps);
        const FrequencyLadder ladder = FrequencyLadder::schrodinger(static_cast<int>(targets.size()));
        MomentVector d = MomentVector::zero(static_cast<int>(targets.size()));
        d.d = targets;
        d.check_real(Settings{});
        SolveResult r = [&] {
          py::gil_scoped_release release;
          return weak_estimate_solver(d, k, ladder, BumpChi::with_default_margin(grid));
        }();
        return py::make_tuple(Eigen::VectorXd(r.u.samples()), report_obj(to_json(r.report)));
      },
      py::arg("targets"), py::arg("k"), py::arg("T") = 1.0, py::arg("n_steps") = 16384,
      "Control of order k with int u e^{i omega_j t} dt = targets[j], omega_j = lambda_{j+1} - lambda_1.");

  m.def(
      "run_command",
      [](const std::string& command, const py::dict& config, std::optional<std::string> out_dir,
         std::optional<std::uint64_t> seed, int threads, bool dt_halve, const std::string& targets,
         const std::string& endpoints, const std::string& mode) {
        CliOptions o;
        o.out_dir = std::move(out_dir);
        o.seed = seed;
        o.threads = threads;
        o.dt_halve = dt_halve;
        o.targets = targets;
        o.endpoints = endpoints;
        o.mode = mode;
        const nlohmann::json cfg = config_from(config);
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_command(command, cfg, o, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs a CLI subcommand on a config dict. Returns (exit_code, stdout, stderr).",
      py::arg("command"), py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(),
      py::arg("threads") = 1, py::arg("dt_halve") = false, py::arg("targets") = "", py::arg("endpoints") = "",
      py::arg("mode") = "linear");
}
