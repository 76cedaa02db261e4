#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "logcap/capacity_bounds.hpp"
#include "logcap/energy.hpp"
#include "logcap/errors.hpp"
#include "logcap/experiments.hpp"
#include "logcap/interval_sets.hpp"
#include "logcap/measures.hpp"
#include "logcap/result_table.hpp"

namespace py = pybind11;
using namespace logcap;

namespace {

Rational to_rational(const py::handle& x) {
  if (py::isinstance<py::str>(x)) return Rational::parse(x.cast<std::string>());
  if (py::isinstance<py::int_>(x)) return Rational(x.cast<long>());
  return Rational::from_double(x.cast<double>());
}

// Endpoints as str ("1/3", "0.25"), int or float (taken exactly).
Interval make_interval(const py::handle& lo, const py::handle& hi) {
  return Interval::from_endpoints(to_rational(lo), to_rational(hi));
}

IntervalUnion make_union(const std::vector<std::pair<py::object, py::object>>& pieces) {
  std::vector<Interval> v;
  v.reserve(pieces.size());
  for (const auto& [lo, hi] : pieces) v.push_back(make_interval(lo, hi));
  return IntervalUnion(std::move(v));
}

py::dict breakdown(const EnergyBreakdown& e) {
  py::dict d;
  d["self_part"] = e.self_part;
  d["cross_part"] = e.cross_part;
  d["total"] = e.total();
  d["certified_error"] = e.certified_error;
  d["policy"] = e.policy_used.tag();
  return d;
}

py::dict tail_dict(const TailSeries& t) {
  py::dict d;
  d["alpha"] = t.alpha;
  d["m"] = t.m;
  d["terms"] = t.terms;
  d["partial_sum"] = t.partial_sum;
  d["lower"] = t.lower();
  d["upper"] = t.upper();
  d["converged"] = t.converged;
  return d;
}

py::dict report_dict(const BoundReport& b) {
  py::dict d;
  d["energy_lower_bound"] = b.energy_lower_bound;
  d["capacity_upper_bound"] = b.capacity_upper_bound;
  d["series_value"] = b.series_value;
  d["converged"] = b.converged;
  return d;
}

CoverDescription cover_of(const std::vector<double>& log_lengths) {
  CoverDescription c;
  for (double l : log_lengths) c.lengths.push_back(LogLength::from_log(l));
  return c;
}

MeasuringFunction gauge(const std::string& name) {
  if (name == "h0") return MeasuringFunction::h0();
  if (name == "loglog") return MeasuringFunction::loglog();
  if (name == "identity") return MeasuringFunction::identity();
  if (name.rfind("power:", 0) == 0) return MeasuringFunction::power(std::stod(name.substr(6)));
  throw InvalidArgument("unknown measuring function: " + name);
}

}  // namespace

PYBIND11_MODULE(_logcap, m) {
  m.doc() = "Logarithmic energies and capacity bounds on interval unions";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
#define LOGCAP_EXC(name) py::register_exception<name>(m, #name, base.ptr())
  LOGCAP_EXC(InvalidArgument);
  LOGCAP_EXC(DisjointnessViolation);
  LOGCAP_EXC(ZeroMassError);
  LOGCAP_EXC(LookupError);
  LOGCAP_EXC(PolicyError);
  LOGCAP_EXC(GeometryError);
  LOGCAP_EXC(PrecisionError);
  LOGCAP_EXC(RepresentationError);
  LOGCAP_EXC(InvalidCutoff);
  LOGCAP_EXC(PreconditionError);
  LOGCAP_EXC(ConfigError);
  LOGCAP_EXC(IoError);
  LOGCAP_EXC(ClaimViolation);
#undef LOGCAP_EXC

  py::class_<StepMeasure>(m, "StepMeasure")
      .def(py::init([](const std::vector<std::pair<py::object, py::object>>& pieces,
                       std::vector<double> weights, double total_mass) {
             return StepMeasure(make_union(pieces), std::move(weights), total_mass);
           }),
           py::arg("pieces"), py::arg("weights"), py::arg("total_mass") = 1.0)
      .def_static("lebesgue", &StepMeasure::lebesgue)
      .def_static("uniform_on",
                  [](const std::vector<std::pair<py::object, py::object>>& pieces) {
                    return StepMeasure::uniform_on(make_union(pieces));
                  })
      .def_static("level",
                  [](const std::string& schedule, long n) {
                    return StepMeasure::uniform_on(make_level(RadiusSchedule::parse(schedule), n));
                  },
                  py::arg("schedule"), py::arg("n"))
      .def("__len__", &StepMeasure::size)
      .def_property_readonly("total_mass", &StepMeasure::total_mass)
      .def("piece_mass", &StepMeasure::piece_mass)
      .def("log_density", &StepMeasure::log_density)
      .def("pieces", [](const StepMeasure& mu) {
        std::vector<std::pair<double, double>> out;
        for (const auto& p : mu.support().pieces()) out.emplace_back(p.lo_double(), p.hi_double());
        return out;
      });

  m.def("self_energy", [](double log_r) { return self_energy_const(LogLength::from_log(log_r)); },
        py::arg("log_r"), "-log r + 3/2 for the uniform measure on an interval of length r.");
  m.def("pair_energy", &uniform_pair_energy, py::arg("d"), py::arg("l1"), py::arg("l2"));
  m.def("energy",
        [](const StepMeasure& mu, const std::string& policy) {
          return breakdown(energy(mu, EvalPolicy::parse(policy)));
        },
        py::arg("mu"), py::arg("policy") = "auto");
  m.def("mutual_energy",
        [](const StepMeasure& mu, const StepMeasure& nu, const std::string& policy) {
          const KernelValue k = mutual_energy(mu, nu, EvalPolicy::parse(policy));
          return std::make_pair(k.value, k.certified_error);
        },
        py::arg("mu"), py::arg("nu"), py::arg("policy") = "auto");
  m.def("truncated_energy", &truncated_energy, py::arg("mu"), py::arg("c"));
  m.def("level_energy",
        [](long n, double log_r, const std::string& policy) {
          return breakdown(
              uniform_level_energy_fast(n, LogLength::from_log(log_r), EvalPolicy::parse(policy)));
        },
        py::arg("n"), py::arg("log_r"), py::arg("policy") = "auto");
  m.def("redistribute",
        [](const StepMeasure& mu, const std::string& schedule, long n) {
          return redistribute(mu, make_level(RadiusSchedule::parse(schedule), n));
        },
        py::arg("mu"), py::arg("schedule"), py::arg("n"));

  m.def("cs_lower_energy_bound",
        [](const std::vector<double>& logs) { return cs_lower_energy_bound(cover_of(logs)); },
        py::arg("log_lengths"));
  m.def("bound_report", [](const std::vector<double>& logs) { return report_dict(bound_report(cover_of(logs))); },
        py::arg("log_lengths"));
  m.def("capacity_bound_from_series", &capacity_bound_from_series, py::arg("series"));
  m.def("tail_series",
        [](double alpha, long start, long terms) { return tail_dict(tail_series(alpha, start, terms)); },
        py::arg("alpha"), py::arg("m"), py::arg("terms"));
  m.def("tail_capacity_bound",
        [](double alpha, long start, long terms) {
          return report_dict(tail_capacity_bound(tail_series(alpha, start, terms)));
        },
        py::arg("alpha"), py::arg("m"), py::arg("terms"));
  m.def("h_volume",
        [](const std::vector<double>& logs, const std::string& h) {
          return h_volume_upper(cover_of(logs), gauge(h));
        },
        py::arg("log_lengths"), py::arg("h") = "h0");
  m.def("ursell_schedule",
        [](const std::string& h, int rows) {
          const UrsellSchedule s = ursell_schedule(gauge(h), doubly_exponential_witness(rows), rows);
          py::list out;
          for (const auto& r : s.rows) {
            py::dict d;
            d["j"] = r.j;
            d["log_abs_log_r"] = r.log_abs_log_r;
            d["log_h"] = r.log_h;
            d["log_n"] = r.log_n;
            d["n"] = r.n_decimal;
            d["log_nh"] = r.log_nh;
            d["log_n_over_abs_log_r"] = r.log_n_over_abs_log_r;
            d["accepted"] = r.accepted;
            out.append(d);
          }
          return out;
        },
        py::arg("h") = "loglog", py::arg("rows") = 5);
  m.def("phase_classify", [](double alpha) { return phase_name(phase_classify(alpha)); },
        py::arg("alpha"));

  // Experiments return the JSON text of their tables; the Python side parses it.
  m.def("_run_convergence",
        [](const std::string& schedule, std::vector<long> grid) {
          ConvergenceConfig c;
          c.schedule = RadiusSchedule::parse(schedule);
          c.n_grid = std::move(grid);
          return to_json_text(run_redistribution_convergence(c));
        });
  m.def("_run_phase", [](std::vector<double> alphas, std::vector<long> grid, long terms) {
    PhaseConfig c;
    c.alpha_grid = std::move(alphas);
    c.m_grid = std::move(grid);
    c.terms = terms;
    c.evidence_m_grid = {16};
    c.evidence_pairs = 5;
    return to_json_text(run_phase_scan(c));
  });
  m.def("_run_counterexample", [](long n1, int depth) {
    return to_json_text(run_counterexample_check({n1, depth}));
  });
}
