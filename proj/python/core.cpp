#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "rkpr/analysis.hpp"
#include "rkpr/experiment.hpp"
#include "rkpr/init.hpp"
#include "rkpr/lemmas.hpp"
#include "rkpr/phase.hpp"

namespace py = pybind11;
using namespace rkpr;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CVector to_cvector(const CArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d complex array");
  return CVector(ConstSpan(a.data(), static_cast<std::size_t>(a.shape(0))));
}

// The pointer constructors copy the data into a freshly owned array.
py::array_t<Complex> to_numpy(ConstSpan v) {
  return py::array_t<Complex>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

py::array_t<double> to_numpy(const std::vector<double>& v) {
  return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())}, v.data());
}

Measurements to_measurements(const RArray& b) {
  if (b.ndim() != 1) throw py::value_error("expected a 1-d real array");
  return Measurements(std::vector<double>(b.data(), b.data() + b.shape(0)));
}

Ensemble ensemble_from_rows(const CArray& rows, const std::string& model) {
  if (rows.ndim() != 2) throw py::value_error("rows must be a 2-d (m, n) complex array");
  const auto m = static_cast<std::size_t>(rows.shape(0));
  const auto n = static_cast<std::size_t>(rows.shape(1));
  return Ensemble(m, n, parse_model(model), std::vector<Complex>(rows.data(), rows.data() + m * n));
}

py::dict trace_to_dict(const SolverTrace& tr) {
  std::vector<double> dist, abs_az;
  std::vector<long long> rows;
  for (const auto& r : tr.records) {
    dist.push_back(r.dist);
    abs_az.push_back(r.abs_az);
    rows.push_back(r.row ? static_cast<long long>(*r.row) : -1);
  }
  py::dict d;
  d["dist"] = to_numpy(dist);
  d["abs_az"] = to_numpy(abs_az);
  d["rows"] = rows;
  d["stopping_time"] = tr.stopping_time ? py::cast(*tr.stopping_time) : py::none();
  d["final_z"] = to_numpy(tr.final_z.view());
  return d;
}

SolverConfig solver_config(std::size_t max_iters, double ball, const std::string& selection,
                           const std::string& policy, bool track) {
  SolverConfig c;
  c.max_iters = max_iters;
  c.ball_radius_rel = ball;
  c.selection = parse_selection(selection);
  c.zero_residual_policy = parse_policy(policy);
  c.track_distance = track;
  return c;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentConfig config_from_dict(const py::dict& d) {
  const std::string text = py::module_::import("json").attr("dumps")(d).cast<std::string>();
  return config_from_json(nlohmann::json::parse(text));
}

py::dict report_dict(const LemmaReport& r) { return json_to_py(report_to_json(r)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized Kaczmarz phase retrieval: solver, analysis and bound checks";

  py::register_exception<DegenerateRowsError>(m, "DegenerateRowsError", PyExc_ValueError);

  py::class_<RngStream>(m, "Rng")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def_property_readonly("seed", &RngStream::seed)
      .def_property_readonly("stream_id", &RngStream::stream_id)
      .def_property_readonly("position", &RngStream::position)
      .def("uniform", &RngStream::uniform)
      .def("complex_normal", &RngStream::complex_normal)
      .def("split", &RngStream::split, py::arg("index"))
      .def_property_readonly_static("generator", [](py::object) { return std::string(RngStream::kGeneratorId); });

  py::class_<Ensemble>(m, "Ensemble")
      .def(py::init(&ensemble_from_rows), py::arg("rows"), py::arg("model") = "complex_gaussian")
      .def_property_readonly("m", &Ensemble::m)
      .def_property_readonly("n", &Ensemble::n)
      .def_property_readonly("model", [](const Ensemble& e) { return std::string(to_string(e.model())); })
      .def_property_readonly("rows", [](const Ensemble& e) {
        py::array_t<Complex> out({static_cast<py::ssize_t>(e.m()), static_cast<py::ssize_t>(e.n())});
        std::copy(e.rows().begin(), e.rows().end(), out.mutable_data());
        return out;
      });

  m.def("sample_unit_sphere", [](std::size_t n, RngStream& rng) { return to_numpy(sample_unit_sphere(n, rng).view()); },
        py::arg("n"), py::arg("rng"));
  m.def("make_ensemble",
        [](std::size_t mm, std::size_t n, const std::string& model, RngStream& rng) {
          return make_ensemble(mm, n, parse_model(model), rng);
        },
        py::arg("m"), py::arg("n"), py::arg("model") = "unit_sphere", py::arg("rng"));
  m.def("measure", [](const Ensemble& e, const CArray& x) {
        const Measurements b = measure(e, to_cvector(x));
        return to_numpy(std::vector<double>(b.values().begin(), b.values().end()));
      }, py::arg("ensemble"), py::arg("x"));

  m.def("dist", [](const CArray& z, const CArray& x) { return dist(to_cvector(z), to_cvector(x)); },
        py::arg("z"), py::arg("x"), "min over psi of ||z - x e^{i psi}||");
  m.def("optimal_phase", [](const CArray& z, const CArray& x) {
        return optimal_phase(to_cvector(z), to_cvector(x));
      }, py::arg("z"), py::arg("x"));

  m.def("pr_step",
        [](const CArray& z, const CArray& a, double b, const std::string& policy) {
          return to_numpy(pr_step(to_cvector(z), to_cvector(a), b, parse_policy(policy)).view());
        },
        py::arg("z"), py::arg("a"), py::arg("b"), py::arg("policy") = "phase_one");

  m.def("run_pr",
        [](const Ensemble& e, const RArray& b, const CArray& z0, std::size_t max_iters, RngStream& rng,
           std::optional<CArray> truth, double ball, const std::string& selection, const std::string& policy) {
          std::optional<CVector> x;
          if (truth) x = to_cvector(*truth);
          const auto cfg = solver_config(max_iters, ball, selection, policy, x.has_value());
          return trace_to_dict(run_pr(e, to_measurements(b), to_cvector(z0), cfg, rng, x ? &*x : nullptr));
        },
        py::arg("ensemble"), py::arg("b"), py::arg("z0"), py::arg("max_iters"), py::arg("rng"),
        py::arg("truth") = py::none(), py::arg("ball_radius_rel") = 0.01,
        py::arg("selection") = "norm_weighted", py::arg("policy") = "phase_one");

  m.def("run_linear",
        [](const Ensemble& e, const CArray& y, const CArray& z0, std::size_t max_iters, RngStream& rng,
           std::optional<CArray> truth, const std::string& selection) {
          std::optional<CVector> x;
          if (truth) x = to_cvector(*truth);
          const auto cfg = solver_config(max_iters, 1.0, selection, "phase_one", x.has_value());
          const CVector yy = to_cvector(y);
          return trace_to_dict(run_linear(e, yy.view(), to_cvector(z0), cfg, rng, x ? &*x : nullptr));
        },
        py::arg("ensemble"), py::arg("y"), py::arg("z0"), py::arg("max_iters"), py::arg("rng"),
        py::arg("truth") = py::none(), py::arg("selection") = "norm_weighted");

  m.def("spectral_init",
        [](const Ensemble& e, const RArray& b, RngStream& rng, std::size_t power_iters, double tol) {
          InitConfig cfg;
          cfg.power_iters = power_iters;
          cfg.tol = tol;
          cfg.norm_model = e.model();
          const InitResult r = spectral_init(e, to_measurements(b), cfg, rng);
          return py::make_tuple(to_numpy(r.z.view()), r.converged, r.iterations);
        },
        py::arg("ensemble"), py::arg("b"), py::arg("rng"), py::arg("power_iters") = 200, py::arg("tol") = 1e-8);
  m.def("planted_init",
        [](const CArray& x, double r, RngStream& rng) { return to_numpy(planted_init(to_cvector(x), r, rng).view()); },
        py::arg("x"), py::arg("rel_radius"), py::arg("rng"));

  m.def("loss", [](const Ensemble& e, const CArray& x, const CArray& z) {
        return loss(e, to_cvector(x), to_cvector(z));
      }, py::arg("ensemble"), py::arg("x"), py::arg("z"));
  m.def("directional_derivative", [](const Ensemble& e, const CArray& x, const CArray& z, const CArray& v) {
        return directional_derivative(e, to_cvector(x), to_cvector(z), to_cvector(v));
      }, py::arg("ensemble"), py::arg("x"), py::arg("z"), py::arg("v"));
  m.def("rsc_margin", [](const Ensemble& e, const CArray& x, const CArray& z) {
        const RscSample s = rsc_margin(e, to_cvector(x), to_cvector(z));
        py::dict d;
        d["h_norm"] = s.h_norm;
        d["f"] = s.f_value;
        d["D"] = s.directional;
        d["gamma_hat"] = s.margin_gamma;
        d["decomposition"] = s.decomposition;
        return d;
      }, py::arg("ensemble"), py::arg("x"), py::arg("z"));
  m.def("expected_step", [](const Ensemble& e, const RArray& b, const CArray& x, const CArray& z) {
        return expected_step(e, to_measurements(b), to_cvector(x), to_cvector(z));
      }, py::arg("ensemble"), py::arg("b"), py::arg("x"), py::arg("z"));

  m.def("mc_F", [](double lambda, double sigma, std::size_t samples, const RngStream& rng, std::size_t threads) {
        return report_dict(mc_F({lambda, sigma}, samples, rng, threads));
      }, py::arg("lam"), py::arg("sigma"), py::arg("samples"), py::arg("rng"), py::arg("threads") = 1);
  m.def("mc_G", [](double lambda, double sigma, std::size_t samples, const RngStream& rng, std::size_t threads) {
        return report_dict(mc_G({lambda, sigma}, samples, rng, threads));
      }, py::arg("lam"), py::arg("sigma"), py::arg("samples"), py::arg("rng"), py::arg("threads") = 1);
  m.def("series_F", [](double lambda, double sigma) { return series_F({lambda, sigma}); },
        py::arg("lam"), py::arg("sigma"));
  m.def("check_covariance",
        [](std::size_t n, std::size_t mm, double delta, std::size_t trials, const RngStream& rng) {
          return report_dict(check_covariance(n, mm, delta, trials, rng));
        },
        py::arg("n"), py::arg("m"), py::arg("delta"), py::arg("trials"), py::arg("rng"));

  // Experiment commands take a config dict with the same keys as the CLI's
  // JSON config and return the summary.
  m.def("solve", [](const py::dict& cfg, bool write) { return json_to_py(cmd_solve(config_from_dict(cfg), write).run.summary); },
        py::arg("config"), py::arg("write") = false);
  m.def("rsc_scan", [](const py::dict& cfg, bool write) { return json_to_py(cmd_rsc_scan(config_from_dict(cfg), write).run.summary); },
        py::arg("config"), py::arg("write") = false);
  m.def("verify", [](const py::dict& cfg, const std::string& lemma, bool write) {
        return json_to_py(cmd_verify(config_from_dict(cfg), lemma, write).run.summary);
      }, py::arg("config"), py::arg("lemma"), py::arg("write") = false);
  m.def("baseline", [](const py::dict& cfg, bool write) { return json_to_py(cmd_baseline(config_from_dict(cfg), write).run.summary); },
        py::arg("config"), py::arg("write") = false);
}
