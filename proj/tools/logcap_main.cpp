#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "logcap/capacity_bounds.hpp"
#include "logcap/energy.hpp"
#include "logcap/errors.hpp"
#include "logcap/experiments.hpp"
#include "logcap/json_io.hpp"
#include "logcap/measures.hpp"
#include "logcap/result_table.hpp"

namespace {

using logcap::Json;

// JSON config: top-level keys are global flags, nested objects are
// subcommand sections, arrays become repeated values.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    return dump(app, default_also).dump(2) + "\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void collect(const Json& j, std::vector<std::string> parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto sub = parents;
        sub.push_back(key);
        // "++" / "--" open and close a section, which runs the subcommand.
        CLI::ConfigItem open;
        open.parents = sub;
        open.name = "++";
        items.push_back(open);
        collect(value, sub, items);
        CLI::ConfigItem close = open;
        close.name = "--";
        items.push_back(close);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }

  static Json dump(const CLI::App* app, bool default_also) {
    Json out = Json::object();
    for (const CLI::Option* opt : app->get_options()) {
      if (opt->get_lnames().empty() || opt->get_configurable() == false) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help" || name == "config") continue;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        out[name] = r.size() == 1 ? Json(r.front()) : Json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        out[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      Json s = dump(sub, default_also);
      if (!s.empty()) out[sub->get_name()] = s;
    }
    return out;
  }
};

struct Globals {
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::string out = ".";
  std::string policy = "auto";
};

logcap::MeasuringFunction parse_measuring_function(const std::string& text) {
  if (text == "h0") return logcap::MeasuringFunction::h0();
  if (text == "loglog") return logcap::MeasuringFunction::loglog();
  if (text == "identity") return logcap::MeasuringFunction::identity();
  if (text.rfind("power:", 0) == 0) {
    return logcap::MeasuringFunction::power(std::stod(text.substr(6)));
  }
  throw logcap::ConfigError("unknown measuring function '" + text +
                            "' (expected h0, loglog, identity or power:A)");
}

logcap::BaseMeasure parse_base(const std::string& text) {
  if (text == "uniform") return logcap::BaseMeasure::Uniform;
  if (text == "cutoff") return logcap::BaseMeasure::ArcsineCutoff;
  throw logcap::ConfigError("unknown base '" + text + "' (expected uniform or cutoff)");
}

logcap::LevelOverlap parse_overlap(const std::string& text) {
  if (text == "reject") return logcap::LevelOverlap::Reject;
  if (text == "report") return logcap::LevelOverlap::Refine;
  throw logcap::ConfigError("unknown overlap mode '" + text + "' (expected reject or report)");
}

std::optional<logcap::StepMeasure> load_density(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return logcap::step_measure_from_json(logcap::read_json_file(path));
}

logcap::ResultTable redistribute_table(long n, std::optional<double> log_r,
                                       const std::string& schedule_text,
                                       const std::optional<logcap::StepMeasure>& density,
                                       const logcap::EvalPolicy& policy,
                                       const std::string& measure_out) {
  using namespace logcap;
  if (n < 1) throw ConfigError("redistribute: n must be positive");
  const RadiusSchedule schedule = RadiusSchedule::parse(schedule_text);
  const LogLength r = log_r ? LogLength::from_log(*log_r) : schedule.radius(n);
  if (!(r.log() < -std::log(static_cast<double>(n)))) {
    throw ConfigError("redistribute: r_n < 1/n is violated at n = " + std::to_string(n));
  }
  const IntervalUnion level = make_uniform_level(n, r);

  ResultTable t("redistribute", {"n", "log_r", "pieces", "mass", "self_part", "cross_part",
                                 "total", "certified_error", "reference_energy",
                                 "normalized_self_ratio", "pass"});
  EnergyBreakdown e;
  double reference = 1.5;
  std::size_t pieces = static_cast<std::size_t>(n);
  double mass = 1.0;
  if (density) {
    const StepMeasure mu = redistribute(*density, level);
    e = energy(mu, policy);
    reference = energy(*density, EvalPolicy::exact()).total();
    pieces = mu.size();
    mass = mu.total_mass();
    if (!measure_out.empty()) {
      std::ofstream f(measure_out);
      if (!f) throw IoError("cannot write " + measure_out);
      f << to_json(mu).dump(2) << "\n";
    }
  } else {
    e = uniform_level_energy_fast(n, r, policy);
    if (!measure_out.empty()) {
      std::ofstream f(measure_out);
      if (!f) throw IoError("cannot write " + measure_out);
      f << to_json(StepMeasure::uniform_on(level)).dump(2) << "\n";
    }
  }
  const double ratio = (e.total() - reference) * static_cast<double>(n) / r.abs_log();
  t.add_row({static_cast<long long>(n), r.log(), static_cast<long long>(pieces), mass,
             e.self_part, e.cross_part, e.total(), e.certified_error, reference, ratio,
             std::abs(mass - 1.0) <= 1e-12});
  t.set_meta("claim", "R(mu | V_n) is a probability measure on V_n");
  t.set_meta("policy", e.policy_used.tag());
  t.set_meta("base", density ? "step density" : "uniform on [0,1]");
  return t;
}

logcap::ResultTable bound_table(const std::string& cover_path, const std::string& h_text) {
  using namespace logcap;
  const CoverDescription cover = cover_from_json(read_json_file(cover_path));
  cover.validate();
  const BoundReport b = bound_report(cover);
  ResultTable t("bound", {"pieces", "series", "energy_lower_bound", "capacity_upper_bound",
                          "log_capacity_upper_bound", "converged", "h_volume", "pass"});
  Cell hv;
  if (!h_text.empty()) hv = h_volume_upper(cover, parse_measuring_function(h_text));
  t.add_row({static_cast<long long>(cover.lengths.size()), b.series_value, b.energy_lower_bound,
             b.capacity_upper_bound, -b.energy_lower_bound, b.converged, hv,
             b.capacity_upper_bound >= 0.0 && b.capacity_upper_bound <= 1.0});
  t.set_meta("claim", "energy of any probability measure on the cover >= 1 / sum 1/|log r_k|");
  t.set_meta("cover", cover_path);
  if (!h_text.empty()) t.set_meta("measuring_function", h_text);
  return t;
}

logcap::ResultTable tail_bound_table(double alpha, long m, long terms) {
  using namespace logcap;
  const TailSeries s = tail_series(alpha, m, terms);
  const BoundReport b = tail_capacity_bound(s);
  ResultTable t("tail_bound", {"alpha", "m", "terms", "series_lower", "series_upper",
                               "energy_lower_bound", "capacity_upper_bound",
                               "log_capacity_upper_bound", "converged", "pass"});
  t.add_row({alpha, static_cast<long long>(m), static_cast<long long>(terms), s.lower(),
             s.upper(), b.energy_lower_bound, b.capacity_upper_bound, -b.energy_lower_bound,
             s.converged, s.lower() <= s.upper()});
  t.set_meta("claim", "capacity of the tail cover from level m <= exp(-1 / sum_{n>=m} n^(1-alpha))");
  t.set_meta("schedule", "log r_n = -n^alpha");
  return t;
}

logcap::ResultTable ursell_table(const std::string& h_text, int rows) {
  using namespace logcap;
  const MeasuringFunction h = parse_measuring_function(h_text);
  const UrsellSchedule s = ursell_schedule(h, doubly_exponential_witness(rows), rows);
  ResultTable t("ursell", {"j", "log_abs_log_r", "log_h", "log_n", "n", "log_nh",
                           "log_n_over_abs_log_r", "h_volume_partial_sum", "verified_wide",
                           "pass"});
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const UrsellRow& r = s.rows[i];
    t.add_row({static_cast<long long>(r.j), r.log_abs_log_r, r.log_h, r.log_n,
               r.n_decimal.empty() ? Cell() : Cell(r.n_decimal), r.log_nh,
               r.log_n_over_abs_log_r,
               i < s.h_volume_partial_sums.size() ? Cell(s.h_volume_partial_sums[i]) : Cell(),
               r.verified_wide, r.accepted});
  }
  t.set_meta("claim", "n_j h(r_j) < 2^-j and n_j / |log r_j| > 2^j");
  t.set_meta("measuring_function", s.h_name);
  t.set_meta("witness", "u_j = 4^(j+1)");
  return t;
}

int emit_all(const std::vector<logcap::ResultTable>& tables, const Globals& g) {
  const logcap::OutputFormat f = logcap::parse_format(g.format);
  std::filesystem::create_directories(g.out);
  bool ok = true;
  for (const auto& t : tables) {
    const auto path = logcap::emit(t, f, g.out);
    std::cout << path.string() << "\n";
    if (!t.all_pass()) {
      std::cerr << "logcap: " << t.id << " has failing rows\n";
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logcap: logarithmic energy and capacity experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with flag values; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Globals g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "plot"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--policy", g.policy, "Evaluation policy: exact, point, auto or auto:X")
      ->capture_default_str();

  std::vector<logcap::ResultTable> tables;
  // Run after parsing so global flags given after the subcommand apply too.
  std::vector<std::pair<CLI::App*, std::function<void()>>> actions;
  auto policy = [&] { return logcap::EvalPolicy::parse(g.policy); };

  // redistribute
  auto* red = app.add_subcommand("redistribute", "Energy of R(mu | V_n) for one level");
  long red_n = 0;
  std::optional<double> red_log_r;
  std::string red_schedule = "subexp:0.5", red_density, red_measure_out;
  red->add_option("--n", red_n, "Number of intervals")->required();
  red->add_option("--log-r", red_log_r, "Natural log of the interval length");
  red->add_option("--schedule", red_schedule, "Schedule used when --log-r is absent")
      ->capture_default_str();
  red->add_option("--density", red_density, "Step density JSON (default: uniform)");
  red->add_option("--measure-out", red_measure_out, "Write the re-distributed measure as JSON");
  actions.emplace_back(red, [&] {
    tables.push_back(redistribute_table(red_n, red_log_r, red_schedule, load_density(red_density),
                                        policy(), red_measure_out));
  });

  // converge
  auto* conv = app.add_subcommand("converge", "Energies of R(mu | V_n) along an n-grid");
  std::string conv_schedule = "subexp:0.5", conv_density;
  std::vector<long> conv_grid{100, 1000, 10000, 100000};
  conv->add_option("--schedule", conv_schedule, "powerexp:A, subexp:B or dyadic")
      ->capture_default_str();
  conv->add_option("--n-grid", conv_grid, "Strictly increasing n values")
      ->delimiter(',')->capture_default_str();
  conv->add_option("--density", conv_density, "Step density JSON (default: uniform)");
  actions.emplace_back(conv, [&] {
    logcap::ConvergenceConfig c;
    c.schedule = logcap::RadiusSchedule::parse(conv_schedule);
    c.n_grid = conv_grid;
    c.policy = policy();
    c.density = load_density(conv_density);
    tables.push_back(logcap::run_redistribution_convergence(c));
  });

  // averaged
  auto* avg = app.add_subcommand("averaged", "Prime-window averaged re-distributions");
  logcap::AveragedConfig ac;
  std::string avg_base = "uniform", avg_overlap = "reject";
  std::optional<long> avg_concentrate;
  bool avg_no_expansion = false;
  avg->add_option("--alpha", ac.alpha, "Exponent in log r_n = -n^alpha")->capture_default_str();
  avg->add_option("--m-grid", ac.m_grid, "Strictly increasing window starts")
      ->delimiter(',')
      ->capture_default_str();
  avg->add_option("--pairs", ac.pairs, "Sampled cross-level pairs per m")->capture_default_str();
  avg->add_flag("--full-pairs", ac.full_pairs, "Enumerate every level pair");
  avg->add_option("--concentrate-on", avg_concentrate, "Put all weight on this prime");
  avg->add_option("--base", avg_base, "uniform or cutoff")->capture_default_str();
  avg->add_option("--delta", ac.cutoff_delta, "Cutoff width")->capture_default_str();
  avg->add_option("--resolution", ac.cutoff_resolution, "Cutoff steps")->capture_default_str();
  avg->add_flag("--no-expansion", avg_no_expansion, "Skip the bilinear expansion check");
  avg->add_option("--on-overlap", avg_overlap, "reject or report overlapping levels")
      ->capture_default_str();
  actions.emplace_back(avg, [&] {
    ac.seed = g.seed;
    ac.policy = policy();
    ac.base = parse_base(avg_base);
    ac.on_overlap = parse_overlap(avg_overlap);
    ac.concentrate_on = avg_concentrate;
    ac.verify_expansion = !avg_no_expansion;
    auto r = logcap::run_averaged_convergence(ac);
    tables.push_back(std::move(r.summary));
    tables.push_back(std::move(r.pairs));
  });

  // phase
  auto* ph = app.add_subcommand("phase", "Phase scan across alpha");
  logcap::PhaseConfig pc;
  ph->add_option("--alpha-grid", pc.alpha_grid, "Strictly increasing alpha values")
      ->delimiter(',')
      ->capture_default_str();
  ph->add_option("--m-grid", pc.m_grid, "Tail starts for alpha > 2")
      ->delimiter(',')->capture_default_str();
  ph->add_option("--terms", pc.terms, "Explicit series terms")->capture_default_str();
  ph->add_option("--evidence-m-grid", pc.evidence_m_grid, "Windows for alpha < 2")
      ->delimiter(',')
      ->capture_default_str();
  ph->add_option("--evidence-pairs", pc.evidence_pairs, "Sampled pairs for alpha < 2")
      ->capture_default_str();
  ph->add_option("--delta", pc.cutoff_delta, "Cutoff width")->capture_default_str();
  ph->add_option("--resolution", pc.cutoff_resolution, "Cutoff steps")->capture_default_str();
  actions.emplace_back(ph, [&] {
    pc.seed = g.seed;
    tables.push_back(logcap::run_phase_scan(pc));
  });

  // counterexample
  auto* ce = app.add_subcommand("counterexample", "Dyadic discontinuity construction");
  logcap::CounterexampleParams cp;
  ce->add_option("--n1", cp.n1, "First level, a power of two")->capture_default_str();
  ce->add_option("--depth", cp.depth, "Recursion depth K")->capture_default_str();
  actions.emplace_back(ce, [&] { tables.push_back(logcap::run_counterexample_check(cp)); });

  // bound
  auto* bd = app.add_subcommand("bound", "Capacity upper bound from a cover or a tail series");
  std::string bd_cover, bd_h;
  std::optional<double> bd_alpha;
  long bd_m = 1, bd_terms = 100000;
  auto* cover_opt = bd->add_option("--cover", bd_cover, "Cover JSON");
  bd->add_option("--gauge", bd_h, "Also report the h-volume for h0, loglog, identity or power:A")
      ->needs(cover_opt);
  auto* alpha_opt =
      bd->add_option("--alpha", bd_alpha, "Tail cover of log r_n = -n^alpha instead of a file");
  bd->add_option("--m", bd_m, "First level of the tail")->capture_default_str()->needs(alpha_opt);
  bd->add_option("--terms", bd_terms, "Explicit series terms")
      ->capture_default_str()
      ->needs(alpha_opt);
  cover_opt->excludes(alpha_opt);
  actions.emplace_back(bd, [&] {
    if (bd_alpha) {
      tables.push_back(tail_bound_table(*bd_alpha, bd_m, bd_terms));
    } else if (bd_cover.empty()) {
      throw logcap::ConfigError("bound: give --cover FILE or --alpha A");
    } else {
      tables.push_back(bound_table(bd_cover, bd_h));
    }
  });

  // ursell
  auto* ur = app.add_subcommand("ursell", "Level schedule for a measuring function");
  std::string ur_h = "loglog";
  int ur_rows = 5;
  ur->add_option("--gauge", ur_h, "h0, loglog, identity or power:A")->capture_default_str();
  ur->add_option("--rows", ur_rows, "Number of rows")->capture_default_str();
  actions.emplace_back(ur, [&] { tables.push_back(ursell_table(ur_h, ur_rows)); });

  // A config section can select the subcommand.
  for (auto& [sub, act] : actions) sub->configurable();

  try {
    app.parse(argc, argv);
    for (auto& [sub, act] : actions) {
      if (sub->parsed()) act();
    }
    return emit_all(tables, g);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const logcap::Error& e) {
    std::cerr << "logcap: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "logcap: " << e.what() << "\n";
    return 2;
  }
}
