#include "logcap/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

Rational rational_field(const Json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number_float()) return Rational::from_double(v.get<double>());
  throw ConfigError("expected a rational number, got " + v.dump());
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const Interval& j) {
  Json o;
  o["center_num"] = j.center().numerator_str();
  o["center_den"] = j.center().denominator_str();
  o["log_half_length"] = j.half_length().log();
  if (j.exact_half_length()) {
    o["half_length"] = j.exact_half_length()->str();
    o["lo"] = j.lo().decimal_str();
    o["hi"] = j.hi().decimal_str();
  }
  o["open"] = j.open();
  return o;
}

Json to_json(const IntervalUnion& u) {
  Json pieces = Json::array();
  for (const auto& p : u.pieces()) pieces.push_back(to_json(p));
  return Json{{"pieces", pieces}};
}

Json to_json(const StepMeasure& mu) {
  Json o = to_json(mu.support());
  Json density = Json::array();
  Json log_density = Json::array();
  Json mass = Json::array();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    density.push_back(finite_or_null(mu.density(i)));
    log_density.push_back(finite_or_null(mu.log_density(i)));
    mass.push_back(mu.piece_mass(i));
  }
  o["density"] = density;
  o["log_density"] = log_density;
  o["piece_mass"] = mass;
  o["mass"] = mu.total_mass();
  return o;
}

Json to_json(const EnergyBreakdown& e) {
  return Json{{"self", e.self_part},
              {"cross", e.cross_part},
              {"total", e.total()},
              {"certified_error", e.certified_error},
              {"policy", e.policy_used.tag()}};
}

Json to_json(const BoundReport& b) {
  return Json{{"energy_lower_bound", b.energy_lower_bound},
              {"capacity_upper_bound", b.capacity_upper_bound},
              {"series_value", finite_or_null(b.series_value)},
              {"converged", b.converged}};
}

Interval interval_from_json(const Json& j) {
  const bool open = j.value("open", true);
  if (j.contains("center_num")) {
    const Rational c = rational_field(j.at("center_num")) / rational_field(j.at("center_den"));
    if (j.contains("half_length")) return Interval::centered_exact(c, rational_field(j["half_length"]), open);
    return Interval::centered(c, LogLength::from_log(j.at("log_half_length").get<double>()), open);
  }
  if (j.contains("lo") && j.contains("hi")) {
    return Interval::from_endpoints(rational_field(j["lo"]), rational_field(j["hi"]), open);
  }
  throw ConfigError("interval needs center_num/center_den/log_half_length or lo/hi: " + j.dump());
}

IntervalUnion interval_union_from_json(const Json& j) {
  if (!j.contains("pieces") || !j["pieces"].is_array()) {
    throw ConfigError("interval union needs a \"pieces\" array");
  }
  std::vector<Interval> pieces;
  for (const auto& p : j["pieces"]) pieces.push_back(interval_from_json(p));
  return IntervalUnion(std::move(pieces));
}

StepMeasure step_measure_from_json(const Json& j) {
  // Pieces may arrive unsorted; keep each value attached to its piece.
  if (!j.contains("pieces") || !j["pieces"].is_array()) {
    throw ConfigError("measure needs a \"pieces\" array");
  }
  const auto& pj = j["pieces"];
  const std::size_t n = pj.size();
  std::vector<Interval> raw;
  for (const auto& p : pj) raw.push_back(interval_from_json(p));

  auto values = [&](const char* key) {
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != n) {
      throw ConfigError(std::string("measure: \"") + key + "\" must have one entry per piece");
    }
    std::vector<double> v;
    for (const auto& x : a) v.push_back(x.is_null() ? NAN : x.get<double>());
    return v;
  };

  std::vector<double> weights(n);
  double total = 0.0;
  if (j.contains("piece_mass")) {
    weights = values("piece_mass");
    total = j.contains("mass") ? j["mass"].get<double>() : 0.0;
    if (!j.contains("mass")) {
      for (double w : weights) total += w;
    }
  } else if (j.contains("log_density")) {
    auto ld = values("log_density");
    double mx = -INFINITY;
    std::vector<double> lm(n);
    for (std::size_t i = 0; i < n; ++i) {
      lm[i] = std::isnan(ld[i]) ? -INFINITY : ld[i] + raw[i].length().log();
      mx = std::max(mx, lm[i]);
    }
    for (std::size_t i = 0; i < n; ++i) weights[i] = std::exp(lm[i] - mx);
    total = j.contains("mass") ? j["mass"].get<double>() : 1.0;
  } else if (j.contains("density")) {
    auto d = values("density");
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(d[i]) || d[i] < 0.0) throw ConfigError("measure: bad density value");
      weights[i] = d[i] == 0.0 ? 0.0 : std::exp(std::log(d[i]) + raw[i].length().log());
      total += weights[i];
    }
    if (j.contains("mass")) total = j["mass"].get<double>();
  } else {
    throw ConfigError("measure needs \"piece_mass\", \"log_density\" or \"density\"");
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (raw[a].center_double() != raw[b].center_double())
      return raw[a].center_double() < raw[b].center_double();
    return raw[a].center() < raw[b].center();
  });
  std::vector<Interval> pieces;
  std::vector<double> w;
  for (std::size_t i : order) {
    pieces.push_back(raw[i]);
    w.push_back(weights[i]);
  }
  return StepMeasure(IntervalUnion(std::move(pieces)), std::move(w), total);
}

CoverDescription cover_from_json(const Json& j) {
  CoverDescription c;
  if (j.contains("log_lengths")) {
    for (const auto& v : j["log_lengths"]) c.lengths.push_back(LogLength::from_log(v.get<double>()));
  } else if (j.contains("lengths")) {
    for (const auto& v : j["lengths"]) c.lengths.push_back(LogLength::from_length(v.get<double>()));
  } else if (j.contains("pieces")) {
    // Covers may overlap, so read pieces without the disjointness check.
    for (const auto& p : j["pieces"]) c.lengths.push_back(interval_from_json(p).length());
  } else {
    throw ConfigError("cover needs \"log_lengths\", \"lengths\" or \"pieces\"");
  }
  c.validate();
  return c;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace logcap
