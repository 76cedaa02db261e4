#include "logcap/capacity_bounds.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

double series_of(const CoverDescription& cover) {
  cover.validate();
  std::vector<double> terms;
  terms.reserve(cover.lengths.size());
  for (const auto& l : cover.lengths) terms.push_back(1.0 / l.abs_log());
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// log h at u = log|log r|, in 50-digit arithmetic, for the built-in kinds.
std::optional<Wide> wide_log_h(const MeasuringFunction& h, const Wide& u) {
  using boost::multiprecision::exp;
  using boost::multiprecision::log;
  switch (h.kind()) {
    case MeasuringFunction::Kind::H0: return Wide(-u);
    case MeasuringFunction::Kind::LogLog: return Wide(-u - log(u));
    case MeasuringFunction::Kind::Power: return Wide(-Wide(h.parameter()) * exp(u));
    case MeasuringFunction::Kind::Custom: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

CoverDescription CoverDescription::from_union(const IntervalUnion& u) {
  CoverDescription c;
  std::vector<Rational> centers;
  for (const auto& p : u.pieces()) {
    c.lengths.push_back(p.length());
    centers.push_back(p.center());
  }
  c.centers = std::move(centers);
  return c;
}

void CoverDescription::validate() const {
  if (lengths.empty()) throw InvalidArgument("cover: no intervals");
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (!(lengths[k].log() < 0.0)) {
      throw InvalidArgument("cover: interval " + std::to_string(k) + " has length >= 1");
    }
  }
  if (centers && centers->size() != lengths.size()) {
    throw InvalidArgument("cover: positions and lengths differ in count");
  }
}

double cs_lower_energy_bound(const CoverDescription& cover) { return 1.0 / series_of(cover); }

double capacity_bound_from_series(double series) {
  if (!(series >= 0.0)) throw InvalidArgument("capacity bound: series must be nonnegative");
  if (std::isinf(series)) return 1.0;
  if (series == 0.0) return 0.0;
  return std::clamp(std::exp(-1.0 / series), 0.0, 1.0);
}

double capacity_upper_bound(const CoverDescription& cover) {
  return capacity_bound_from_series(series_of(cover));
}

BoundReport bound_report(const CoverDescription& cover) {
  BoundReport r;
  r.series_value = series_of(cover);
  r.energy_lower_bound = 1.0 / r.series_value;
  r.capacity_upper_bound = capacity_bound_from_series(r.series_value);
  r.converged = true;
  return r;
}

TailSeries tail_series(double alpha, long m, long terms) {
  if (!(alpha > 0.0)) throw InvalidArgument("tail_series: alpha must be positive");
  if (m < 1 || terms < 1) throw InvalidArgument("tail_series: m and terms must be positive");
  TailSeries t;
  t.alpha = alpha;
  t.m = m;
  t.terms = terms;
  // Smallest terms first.
  double s = 0.0;
  for (long n = m + terms - 1; n >= m; --n) s += std::pow(static_cast<double>(n), 1.0 - alpha);
  t.partial_sum = s;
  const double big_m = static_cast<double>(m + terms);
  if (alpha > 2.0) {
    t.converged = true;
    t.remainder_lower = std::pow(big_m, 2.0 - alpha) / (alpha - 2.0);
    t.remainder_upper = std::pow(big_m, 1.0 - alpha) + t.remainder_lower;
  } else {
    t.converged = false;
    t.remainder_lower = INFINITY;
    t.remainder_upper = INFINITY;
  }
  return t;
}

TailSeries tail_series(const RadiusSchedule& s, long m, long terms) {
  if (s.kind() != RadiusSchedule::Kind::PowerExp) {
    throw InvalidArgument("tail_series: schedule must be powerexp");
  }
  return tail_series(s.parameter(), m, terms);
}

BoundReport tail_capacity_bound(const TailSeries& t) {
  BoundReport r;
  r.converged = t.converged;
  r.series_value = t.upper();
  if (!t.converged) {
    r.energy_lower_bound = 0.0;
    r.capacity_upper_bound = 1.0;
    return r;
  }
  r.energy_lower_bound = 1.0 / r.series_value;
  r.capacity_upper_bound = capacity_bound_from_series(r.series_value);
  return r;
}

// ---------------------------------------------------------------------------

MeasuringFunction::MeasuringFunction(std::string name, LogEval log_h)
    : name_(std::move(name)), log_h_(std::move(log_h)) {
  if (!log_h_) throw InvalidArgument("measuring function: empty evaluator");
}

MeasuringFunction MeasuringFunction::h0() {
  MeasuringFunction f("h0", [](double u) { return -u; });
  f.kind_ = Kind::H0;
  return f;
}

MeasuringFunction MeasuringFunction::loglog() {
  MeasuringFunction f("loglog", [](double u) -> double {
    if (!(u > 0.0)) return NAN;
    return -u - std::log(u);
  });
  f.kind_ = Kind::LogLog;
  return f;
}

MeasuringFunction MeasuringFunction::identity() { return power(1.0); }

MeasuringFunction MeasuringFunction::power(double a) {
  if (!(a > 0.0)) throw InvalidArgument("measuring function: power must be positive");
  std::ostringstream os;
  os << "power:" << a;
  MeasuringFunction f(a == 1.0 ? "identity" : os.str(), [a](double u) { return -a * std::exp(u); });
  f.kind_ = Kind::Power;
  f.param_ = a;
  return f;
}

double MeasuringFunction::log_h_at(double log_abs_log_r) const {
  const double v = log_h_(log_abs_log_r);
  if (std::isnan(v) || v == INFINITY) {
    std::ostringstream msg;
    msg << "measuring function " << name_ << " is not positive and finite at log|log r| = "
        << log_abs_log_r;
    throw InvalidArgument(msg.str());
  }
  return v;
}

double h_volume_upper(const CoverDescription& cover, const MeasuringFunction& h) {
  cover.validate();
  std::vector<double> terms;
  terms.reserve(cover.lengths.size());
  for (const auto& l : cover.lengths) {
    const double lh = h.log_h(l);
    if (lh == -INFINITY) {
      throw InvalidArgument("measuring function " + h.name() + " vanishes on the cover");
    }
    terms.push_back(std::exp(lh));
  }
  std::sort(terms.begin(), terms.end());
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

// ---------------------------------------------------------------------------

std::size_t UrsellSchedule::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const UrsellRow& r) { return r.accepted; }));
}

std::vector<double> doubly_exponential_witness(int count) {
  std::vector<double> u;
  for (int j = 1; j <= count; ++j) u.push_back(std::ldexp(1.0, 2 * (j + 1)));
  return u;
}

UrsellSchedule ursell_schedule(const MeasuringFunction& h,
                               const std::vector<double>& witness_log_abs_log_r, int count) {
  if (count < 1) throw InvalidArgument("ursell_schedule: count must be positive");
  if (witness_log_abs_log_r.size() < static_cast<std::size_t>(count)) {
    throw InvalidArgument("ursell_schedule: witness sequence shorter than count");
  }
  UrsellSchedule out;
  out.h_name = h.name();
  double volume = 0.0;
  for (int j = 1; j <= count; ++j) {
    const double u = witness_log_abs_log_r[static_cast<std::size_t>(j - 1)];
    const double log_h = h.log_h_at(u);
    // Premise h |log r| <= 4^(-j-1); equality is the witness family's own boundary,
    // so compare with a relative slack of 1e-12.
    const double lhs = log_h + u;
    const double rhs = -(j + 1) * std::log(4.0);
    if (lhs > rhs + 1e-12 * std::max(1.0, std::fabs(u))) {
      std::ostringstream msg;
      msg << "ursell_schedule: witness violates h(r_j)|log r_j| <= 4^(-j-1) at j = " << j
          << " (log of left side " << lhs << ", bound " << rhs << ")";
      throw PreconditionError(msg.str());
    }

    UrsellRow row;
    row.j = j;
    row.log_abs_log_r = u;
    row.log_h = log_h;
    const double x = 0.5 * (u - log_h);  // log sqrt(|log r| / h)
    // floor(e^x) with log n in [log(e^x - 1), x]
    double log_n_hi = x;
    double log_n_lo = x + std::log(-std::expm1(-x));
    if (x < 60.0) {
      const double n = std::floor(std::exp(x));
      if (n < 1.0) {
        row.reason = "n_j = 0";
        out.rows.push_back(row);
        continue;
      }
      log_n_hi = log_n_lo = std::log(n);
    }
    row.log_n = log_n_hi;
    row.log_nh = log_n_hi + log_h;
    row.log_n_over_abs_log_r = log_n_lo - u;
    const bool first = row.log_nh < -j * M_LN2;
    const bool second = row.log_n_over_abs_log_r > j * M_LN2;

    // Re-verification in 50-digit arithmetic.
    if (auto wlh = wide_log_h(h, Wide(u))) {
      using boost::multiprecision::exp;
      using boost::multiprecision::floor;
      using boost::multiprecision::log;
      const Wide wu(u);
      const Wide wx = (wu - *wlh) / 2;
      Wide lo;
      Wide hi;
      if (wx < 100) {
        const Wide n = floor(exp(wx));
        row.n_decimal = static_cast<boost::multiprecision::cpp_int>(n).str();
        lo = hi = log(n);
      } else {
        hi = wx;
        lo = wx + log(-boost::multiprecision::expm1(-wx));
      }
      const Wide ln2 = log(Wide(2));
      const bool w1 = hi + *wlh < -j * ln2;
      const bool w2 = lo - wu > j * ln2;
      row.verified_wide = w1 && w2;
    } else {
      if (x < 60.0) {
        std::ostringstream os;
        os.precision(0);
        os << std::fixed << std::floor(std::exp(x));
        row.n_decimal = os.str();
      }
      row.verified_wide = first && second;
    }

    row.accepted = first && second && row.verified_wide;
    if (!first) row.reason = "n_j h(r_j) >= 2^-j";
    if (!second) row.reason += std::string(row.reason.empty() ? "" : "; ") + "n_j/|log r_j| <= 2^j";
    if (first && second && !row.verified_wide) row.reason = "failed extended-precision check";
    if (row.accepted) {
      volume += std::exp(row.log_nh);
      out.h_volume_partial_sums.push_back(volume);
    }
    out.rows.push_back(row);
  }
  return out;
}

Phase phase_classify(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("phase_classify: alpha must be positive");
  }
  if (alpha > 2.0) return Phase::ZeroCapacity;
  if (alpha < 2.0) return Phase::FullCapacity;
  return Phase::OpenBoundary;
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::ZeroCapacity: return "ZeroCapacity";
    case Phase::FullCapacity: return "FullCapacity";
    case Phase::OpenBoundary: return "OpenBoundary";
  }
  return "?";
}

}  // namespace logcap
