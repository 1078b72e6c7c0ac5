#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tmlab/config.hpp"
#include "tmlab/errors.hpp"
#include "tmlab/finsler.hpp"
#include "tmlab/functionals.hpp"
#include "tmlab/profiles.hpp"
#include "tmlab/runner.hpp"
#include "tmlab/seqopt.hpp"
#include "tmlab/supsearch.hpp"

namespace py = pybind11;
using namespace tmlab;

namespace {

// Structured results cross the boundary as plain dicts.
py::object to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_py(const py::object& o) {
  return nlohmann::json::parse(py::cast<std::string>(py::module_::import("json").attr("dumps")(o)));
}

py::dict functional_dict(const FunctionalValue& v) {
  py::dict d;
  d["value"] = v.value;
  d["log_value"] = v.log_value;
  d["error_estimate"] = v.error_estimate;
  d["log_plateau"] = v.log_plateau;
  d["truncation_terms"] = v.truncation_terms;
  d["saturated"] = v.saturated;
  d["within_hypothesis"] = v.within_hypothesis;
  return d;
}

TMParams params_from(const py::object& o) {
  if (o.is_none()) return TMParams{};
  auto p = TMParams::from_json(from_py(o));
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of tmlab";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<GaugeConstants>(m, "GaugeConstants")
      .def_readonly("dim", &GaugeConstants::dim)
      .def_readonly("kappa", &GaugeConstants::kappa)
      .def_readonly("omega", &GaugeConstants::omega)
      .def_readonly("lam", &GaugeConstants::lambda)
      .def_readonly("alpha", &GaugeConstants::alpha)
      .def_readonly("gamma", &GaugeConstants::gamma)
      .def("__repr__", [](const GaugeConstants& c) {
        std::ostringstream s;
        s << "GaugeConstants(dim=" << c.dim << ", kappa=" << c.kappa << ", lam=" << c.lambda
          << ", gamma=" << c.gamma << ")";
        return s.str();
      });

  py::class_<Gauge>(m, "Gauge")
      .def_static("euclidean", &Gauge::euclidean, py::arg("dim"))
      .def_static("pnorm", &Gauge::pnorm, py::arg("dim"), py::arg("p"))
      .def_static("ellipsoid", &Gauge::ellipsoid, py::arg("matrix"))
      .def_static("radial_2d", &Gauge::radial_2d, py::arg("radii"), py::arg("samples") = 0)
      .def_static("from_dict", [](const py::object& o) { return Gauge::from_json(from_py(o)); })
      .def("to_dict", [](const Gauge& g) { return to_py(g.to_json()); })
      .def_property_readonly("dim", &Gauge::dim)
      .def("__call__", [](const Gauge& g, const std::vector<double>& xi) { return g.eval(xi); })
      .def("polar", [](const Gauge& g, const std::vector<double>& x) { return g.polar(x); })
      .def("grad", [](const Gauge& g, const std::vector<double>& xi) { return g.grad(xi); })
      .def("grad_polar", [](const Gauge& g, const std::vector<double>& x) { return g.grad_polar(x); })
      .def("wulff_volume_closed_form", &Gauge::wulff_volume_closed_form)
      .def("__repr__", &Gauge::describe);

  m.def("wulff_volume", &wulff_volume, py::arg("gauge"), py::arg("rel_tol") = 1e-7);
  m.def("constants", &constants, py::arg("gauge"));
  m.def("constants_from_kappa", &constants_from_kappa, py::arg("dim"), py::arg("kappa"));
  m.def("unit_ball_volume", &unit_ball_volume, py::arg("dim"));

  py::class_<RadialProfile>(m, "RadialProfile")
      .def(py::init<std::vector<double>, std::vector<double>, int, double, std::string>(),
           py::arg("log_r"), py::arg("values"), py::arg("dim"), py::arg("kappa"), py::arg("gauge_label"))
      .def("__len__", &RadialProfile::size)
      .def("__call__", &RadialProfile::operator(), py::arg("r"))
      .def("log_radii", [](const RadialProfile& u) {
        std::vector<double> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = u.log_radius(i);
        return out;
      })
      .def("values", [](const RadialProfile& u) {
        std::vector<double> out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = u.value(i);
        return out;
      })
      .def_property_readonly("plateau_value", &RadialProfile::plateau_value)
      .def_property_readonly("dim", &RadialProfile::dim)
      .def_property_readonly("kappa", &RadialProfile::kappa)
      .def("dilated", &RadialProfile::dilated, py::arg("factor"))
      .def("scaled", &RadialProfile::scaled, py::arg("c"))
      .def("to_csv", [](const RadialProfile& u) {
        std::ostringstream s;
        u.write_csv(s);
        return s.str();
      })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream s(text);
        return RadialProfile::read_csv(s);
      });

  m.def("moser_profile", py::overload_cast<double, int, double, const Gauge&>(&moser_profile), py::arg("n"),
        py::arg("dim"), py::arg("beta"), py::arg("gauge"));
  m.def("moser_plateau", &moser_plateau, py::arg("n"), py::arg("dim"), py::arg("beta"), py::arg("kappa"));
  m.def("random_profile", &random_profile, py::arg("dim"), py::arg("kappa"), py::arg("gauge_label"),
        py::arg("seed"), py::arg("nodes") = 64);
  m.def("solve_cn", py::overload_cast<double, double, int>(&solve_cn), py::arg("lq_norm"), py::arg("a"),
        py::arg("dim"));

  m.def("dirichlet_norm", py::overload_cast<const RadialProfile&>(&dirichlet_norm), py::arg("u"));
  m.def("lq_norm", &lq_norm, py::arg("u"), py::arg("q"));
  m.def("phi_start_index", &phi_start_index, py::arg("N"), py::arg("q"), py::arg("beta"));
  m.def(
      "phi",
      [](double t, int N, double q, double beta) { return phi_series(t, N, q, beta).value; },
      py::arg("t"), py::arg("N"), py::arg("q"), py::arg("beta"));
  m.def(
      "tm_integral",
      [](const RadialProfile& u, const py::object& params, const std::string& variant) {
        return functional_dict(tm_integral(u, params_from(params), variant_from_string(variant)));
      },
      py::arg("u"), py::arg("params") = py::none(), py::arg("variant") = "PHI");
  m.def(
      "ratio",
      [](const RadialProfile& u, const py::object& params, const std::string& theorem) {
        return functional_dict(ratio(u, params_from(params), theorem_from_string(theorem)));
      },
      py::arg("u"), py::arg("params") = py::none(), py::arg("theorem") = "T11");

  m.def(
      "mu_estimate",
      [](double h, double q, double N, std::size_t K, int starts, std::uint64_t seed, int jobs) {
        MuOptions o;
        o.K = K;
        o.starts = starts;
        o.seed = seed;
        o.jobs = jobs;
        MuResult r;
        {
          py::gil_scoped_release release;
          r = mu_estimate(h, q, N, o);
        }
        py::dict d;
        d["mu_upper"] = r.mu_upper;
        d["kkt_residual"] = r.kkt_residual;
        d["active_constraint"] = r.active_constraint;
        d["a"] = r.a;
        d["K"] = r.K;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("h"), py::arg("q") = 2.0, py::arg("N") = 2.0, py::arg("K") = 0, py::arg("starts") = 8,
      py::arg("seed") = 0, py::arg("jobs") = 1);
  m.def("mu_asymptotic", &mu_asymptotic, py::arg("h"), py::arg("q"), py::arg("N"));

  m.def(
      "sharpness_sweep",
      [](const std::string& theorem, const py::object& params, const Gauge& g, const std::vector<double>& n_list,
         int jobs) {
        const auto c = constants(g);
        SweepOptions o;
        o.jobs = jobs;
        GrowthReport r;
        const auto p = params_from(params);
        {
          py::gil_scoped_release release;
          r = sharpness_sweep(theorem_from_string(theorem), p, c, g.describe(), n_list, o);
        }
        return to_py(r.to_json());
      },
      py::arg("theorem"), py::arg("params"), py::arg("gauge"), py::arg("n_list"), py::arg("jobs") = 1);
  m.def("atmc_bracket", &atmc_bracket, py::arg("lambda_rel"), py::arg("N"), py::arg("q"), py::arg("beta"),
        py::arg("a"), py::arg("b"));

  m.def(
      "run",
      [](const py::object& config) {
        const auto cfg = ExperimentConfig::from_json(from_py(config));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["summary"] = r.summary;
        d["table"] = to_py(r.table.to_json());
        d["report"] = to_py(r.report);
        return d;
      },
      py::arg("config"));
}
