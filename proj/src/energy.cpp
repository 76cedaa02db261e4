#include "logcap/energy.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "logcap/errors.hpp"
#include "parallel.hpp"

namespace logcap {

namespace {

constexpr int kNodes = 20;
constexpr double kExactLogLimit = 30.0;

struct GaussLegendre {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};

  GaussLegendre() {
    for (int i = 0; i < kNodes; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (kNodes + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= kNodes; ++k) {
          double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = kNodes * (z * p1 - p0) / (z * z - 1.0);
        double dz = p1 / dp;
        z -= dz;
        if (std::fabs(dz) < 1e-16) break;
      }
      x[i] = z;
      w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre& gl() {
  static const GaussLegendre rule;
  return rule;
}

// log(1 - y^2) for 0 <= y <= 1.
double ell(double y) { return std::log1p(-y * y); }

// (1+y)log(1+y) - (1-y)log(1-y) - 2y, an antiderivative of log(1 - y^2).
double big_lambda(double y) {
  double right = y >= 1.0 ? 0.0 : (1.0 - y) * std::log1p(-y);
  return (1.0 + y) * std::log1p(y) - right - 2.0 * y;
}

// Antiderivative of y log(1 - y^2).
double big_m(double y) {
  double z = (1.0 - y) * (1.0 + y);
  double zl = z <= 0.0 ? 0.0 : z * std::log(z);
  return -0.5 * (zl - z);
}

// int_{y0}^{y1} log(1 - y^2) dy, 0 <= y0 <= y1 <= 1.
double int_ell(double y0, double y1) {
  if (!(y1 > y0)) return 0.0;
  const double width = y1 - y0;
  if (1.0 - y1 >= width) {
    const auto& r = gl();
    const double half = 0.5 * width;
    const double mid = y0 + half;
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) s += r.w[k] * ell(mid + half * r.x[k]);
    return s * half;
  }
  return big_lambda(y1) - big_lambda(y0);
}

// Ramp term: (1/(4 l l')) * int over the ramp of (y1 - y) log(1 - y^2),
// rescaled so the l' factor cancels. Returns d^2/(l l') * int_{y0}^{y1} (y1-y) ell.
double ramp_term(double y0, double y1, double d, double l, double lp) {
  if (!(y1 > y0) || lp == 0.0) return 0.0;
  const double width = y1 - y0;
  if (1.0 - y1 >= width) {
    const auto& r = gl();
    const double half = 0.5 * width;
    const double mid = y0 + half;
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) s += r.w[k] * (1.0 - r.x[k]) * ell(mid + half * r.x[k]);
    // d^2/(l l') * half^2 with half = l'/(2d)
    return s * (lp / (4.0 * l));
  }
  const double integral = y1 * (big_lambda(y1) - big_lambda(y0)) - (big_m(y1) - big_m(y0));
  return d * d / (l * lp) * integral;
}

// int_{t0}^{t0+width} w(t) log|t| dt with w linear from w0 to w1.
double lin_log(double t0, double width, double w0, double w1) {
  if (!(width > 0.0)) return 0.0;
  const double t1 = t0 + width;
  const double dist = t0 > 0.0 ? t0 : (t1 < 0.0 ? -t1 : 0.0);
  if (dist >= width) {
    const auto& r = gl();
    const double half = 0.5 * width;
    double s = 0.0;
    for (int k = 0; k < kNodes; ++k) {
      const double u = 0.5 * (1.0 + r.x[k]);
      const double t = t0 + half * (1.0 + r.x[k]);
      s += r.w[k] * (w0 + (w1 - w0) * u) * std::log(std::fabs(t));
    }
    return s * half;
  }
  const double beta = (w1 - w0) / width;
  const double alpha = w0 - beta * t0;
  auto h1 = [](double t) { return t == 0.0 ? 0.0 : t * std::log(std::fabs(t)) - t; };
  auto h2 = [](double t) {
    return t == 0.0 ? 0.0 : 0.5 * t * t * std::log(std::fabs(t)) - 0.25 * t * t;
  };
  return alpha * (h1(t1) - h1(t0)) + beta * (h2(t1) - h2(t0));
}

struct Trapezoid {
  // density of t = x - y; x uniform of length l, y of length lp, l >= lp
  double d, l, lp, p, q;
};

Trapezoid trapezoid(double d, double l1, double l2) {
  const double l = std::max(l1, l2);
  const double lp = std::min(l1, l2);
  return {std::fabs(d), l, lp, 0.5 * (l + lp), 0.5 * (l - lp)};
}

// Energy with lengths and distance of order one or smaller.
double pair_energy_scaled(double d, double l1, double l2) {
  const Trapezoid z = trapezoid(d, l1, l2);
  if (z.d >= z.p) {
    const double yq = z.q / z.d;
    const double yp = std::min(1.0, z.p / z.d);
    const double plateau = z.d / z.l * int_ell(0.0, std::min(yq, yp));
    const double ramp = ramp_term(std::min(yq, yp), yp, z.d, z.l, z.lp);
    return -std::log(z.d) - plateau - ramp;
  }
  // Overlapping: integrate log|t| against the trapezoid directly.
  double acc = 0.0;
  if (z.l > z.lp) acc += lin_log(z.d - z.q, z.l - z.lp, 1.0, 1.0) / z.l;
  if (z.lp > 0.0) {
    acc += lin_log(z.d + z.q, z.lp, 1.0, 0.0) * (z.lp / (z.l * z.lp));
    acc += lin_log(z.d - z.q - z.lp, z.lp, 0.0, 1.0) * (z.lp / (z.l * z.lp));
  }
  return -acc;
}

void check_exact_range(double log_len) {
  if (std::fabs(log_len) > kExactLogLimit) {
    std::ostringstream msg;
    msg << "Exact policy refuses |log r| = " << std::fabs(log_len)
        << " > 30; use the Auto policy";
    throw PrecisionError(msg.str());
  }
}

double point_charge_error(double log_rho) {
  const double rho = std::exp(log_rho);
  return std::min(2.0, -std::log1p(-rho));
}

// d = center distance (may be 0), lengths given by their logs.
KernelValue pair_kernel(double d, double log_l1, double log_l2, const EvalPolicy& policy) {
  const double log_d = d > 0.0 ? std::log(d) : -INFINITY;
  const double log_p = log_add_exp(log_l1, log_l2) - M_LN2;
  const double log_rho = log_p - log_d;

  bool use_point = false;
  switch (policy.mode) {
    case EvalMode::PointCharge:
      if (log_rho > 0.0) throw PolicyError("PointCharge policy: intervals overlap");
      if (log_rho == 0.0) throw GeometryError("PointCharge policy: rho = 1 (touching intervals)");
      use_point = true;
      break;
    case EvalMode::Auto:
      use_point = log_rho < std::log(policy.rho_threshold);
      break;
    case EvalMode::Exact:
      break;
  }
  if (use_point) return {-log_d, point_charge_error(log_rho)};

  // Scale invariance: I(d, l, l') = -log s + I(d/s, l/s, l'/s).
  const double log_s = std::max({log_l1, log_l2, log_d});
  const double sd = d > 0.0 ? std::exp(log_d - log_s) : 0.0;
  const double v =
      pair_energy_scaled(sd, std::exp(log_l1 - log_s), std::exp(log_l2 - log_s)) - log_s;
  return {v, 0.0};
}

struct Geom {
  const Rational* center;
  double c;
  long long num = 0;
  long long den = 0;
  bool small = false;
  double log_len;
};

std::vector<Geom> geometry(const StepMeasure& mu, const EvalPolicy& policy) {
  std::vector<Geom> g;
  g.reserve(mu.size());
  for (const auto& p : mu.support().pieces()) {
    Geom x{&p.center(), p.center_double(), 0, 0, false, p.length().log()};
    const mpq_class& q = p.center().raw();
    if (mpz_fits_slong_p(q.get_num_mpz_t()) && mpz_fits_slong_p(q.get_den_mpz_t())) {
      x.num = mpz_get_si(q.get_num_mpz_t());
      x.den = mpz_get_si(q.get_den_mpz_t());
      x.small = x.den < (1LL << 62) && std::llabs(x.num) < (1LL << 62);
    }
    if (policy.mode == EvalMode::Exact) check_exact_range(x.log_len);
    g.push_back(x);
  }
  return g;
}

double distance(const Geom& a, const Geom& b) {
  if (a.small && b.small) {
    __int128 num = static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den;
    if (num < 0) num = -num;
    if (num == 0) return 0.0;
    __int128 den = static_cast<__int128>(a.den) * b.den;
    return static_cast<double>(num) / static_cast<double>(den);
  }
  return (*a.center - *b.center).abs().to_double();
}

std::vector<double> masses(const StepMeasure& mu) {
  std::vector<double> m(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) m[i] = mu.piece_mass(i);
  return m;
}

// Canonical order so that the double sum is identical for (mu, nu) and (nu, mu).
bool canonical_first(const StepMeasure& a, const StepMeasure& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ca = a.support()[i].center_double();
    const double cb = b.support()[i].center_double();
    if (ca != cb) return ca < cb;
    const double la = a.support()[i].length().log();
    const double lb = b.support()[i].length().log();
    if (la != lb) return la < lb;
    const double ma = a.piece_mass(i);
    const double mb = b.piece_mass(i);
    if (ma != mb) return ma < mb;
  }
  return true;
}

}  // namespace

double kernel_antiderivative(double t) {
  if (t == 0.0) return 0.0;
  return 0.5 * t * t * std::log(std::fabs(t)) - 0.75 * t * t;
}

EvalPolicy EvalPolicy::automatic(double rho_threshold) {
  if (!(rho_threshold > 0.0 && rho_threshold < 1.0)) {
    throw InvalidArgument("Auto policy: threshold must lie in (0,1)");
  }
  return {EvalMode::Auto, rho_threshold};
}

EvalPolicy EvalPolicy::parse(const std::string& text) {
  if (text == "exact") return exact();
  if (text == "point" || text == "point-charge") return point_charge();
  if (text == "auto") return automatic();
  if (text.rfind("auto:", 0) == 0) {
    try {
      return automatic(std::stod(text.substr(5)));
    } catch (const InvalidArgument&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("bad policy '" + text + "'");
    }
  }
  throw ConfigError("unknown policy '" + text + "' (exact, point, auto, auto:THRESHOLD)");
}

std::string EvalPolicy::tag() const {
  switch (mode) {
    case EvalMode::Exact: return "exact";
    case EvalMode::PointCharge: return "point";
    case EvalMode::Auto: {
      std::ostringstream os;
      os << "auto:" << rho_threshold;
      return os.str();
    }
  }
  return "?";
}

double uniform_pair_energy(double d, double l1, double l2) {
  if (!(l1 > 0.0 && l2 > 0.0) || !std::isfinite(d)) {
    throw InvalidArgument("uniform_pair_energy: lengths must be positive");
  }
  const double log_s = std::log(std::max({l1, l2, std::fabs(d)}));
  const double s = std::exp(log_s);
  return pair_energy_scaled(std::fabs(d) / s, l1 / s, l2 / s) - log_s;
}

KernelValue mutual_energy_const(const Interval& a, const Interval& b, const EvalPolicy& policy) {
  if (policy.mode == EvalMode::Exact) {
    check_exact_range(a.length().log());
    check_exact_range(b.length().log());
  }
  const Rational gap = (a.center() - b.center()).abs();
  if (policy.mode == EvalMode::PointCharge && a.exact_half_length() && b.exact_half_length()) {
    // Decide rho against 1 exactly; the double path can round either way.
    const int c = (*a.exact_half_length() + *b.exact_half_length() - gap).sign();
    if (c > 0) throw PolicyError("PointCharge policy: intervals overlap");
    if (c == 0) throw GeometryError("PointCharge policy: rho = 1 (touching intervals)");
  }
  return pair_kernel(gap.to_double(), a.length().log(), b.length().log(), policy);
}

double self_energy_const(LogLength length) { return -length.log() + 1.5; }

namespace {

// Coincident pieces (possible across terms of a sum) use the analytic self value.
KernelValue piece_pair(const Geom& a, const Geom& b, const EvalPolicy& policy) {
  const double d = distance(a, b);
  if (d == 0.0 && a.log_len == b.log_len) return {-a.log_len + 1.5, 0.0};
  return pair_kernel(d, a.log_len, b.log_len, policy);
}

EnergyBreakdown energy_core(const std::vector<Geom>& g, const std::vector<double>& m,
                            const EvalPolicy& policy) {
  EnergyBreakdown out;
  out.policy_used = policy;
  const std::size_t n = g.size();
  if (n == 0) return out;
  std::vector<double> self_terms(n);
  for (std::size_t i = 0; i < n; ++i) self_terms[i] = m[i] * m[i] * (-g[i].log_len + 1.5);

  std::vector<double> row_value(n, 0.0);
  std::vector<double> row_error(n, 0.0);
  detail::parallel_for(n, [&](std::size_t i) {
    double v = 0.0;
    double e = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const KernelValue k = piece_pair(g[i], g[j], policy);
      v += m[j] * k.value;
      e += m[j] * k.certified_error;
    }
    row_value[i] = 2.0 * m[i] * v;
    row_error[i] = 2.0 * m[i] * e;
  });
  out.self_part = detail::ordered_sum(self_terms);
  out.cross_part = detail::ordered_sum(row_value);
  out.certified_error = detail::ordered_sum(row_error);
  return out;
}

}  // namespace

EnergyBreakdown energy(const StepMeasure& mu, const EvalPolicy& policy) {
  return energy_core(geometry(mu, policy), masses(mu), policy);
}

EnergyBreakdown energy_of_sum(const std::vector<std::pair<double, const StepMeasure*>>& terms,
                              const EvalPolicy& policy) {
  std::vector<Geom> g;
  std::vector<double> m;
  for (const auto& [coef, mu] : terms) {
    if (!(coef >= 0.0) || !std::isfinite(coef)) {
      throw InvalidArgument("energy_of_sum: coefficients must be finite and nonnegative");
    }
    const auto gi = geometry(*mu, policy);
    for (std::size_t i = 0; i < gi.size(); ++i) {
      const double w = coef * mu->piece_mass(i);
      if (w == 0.0) continue;
      g.push_back(gi[i]);
      m.push_back(w);
    }
  }
  return energy_core(g, m, policy);
}

KernelValue mutual_energy(const StepMeasure& mu_in, const StepMeasure& nu_in,
                          const EvalPolicy& policy) {
  const bool keep = canonical_first(mu_in, nu_in);
  const StepMeasure& mu = keep ? mu_in : nu_in;
  const StepMeasure& nu = keep ? nu_in : mu_in;
  const auto gm = geometry(mu, policy);
  const auto gn = geometry(nu, policy);
  const auto mm = masses(mu);
  const auto mn = masses(nu);
  std::vector<double> row_value(gm.size(), 0.0);
  std::vector<double> row_error(gm.size(), 0.0);
  detail::parallel_for(gm.size(), [&](std::size_t i) {
    double v = 0.0;
    double e = 0.0;
    for (std::size_t j = 0; j < gn.size(); ++j) {
      const KernelValue k = piece_pair(gm[i], gn[j], policy);
      v += mn[j] * k.value;
      e += mn[j] * k.certified_error;
    }
    row_value[i] = mm[i] * v;
    row_error[i] = mm[i] * e;
  });
  return {detail::ordered_sum(row_value), detail::ordered_sum(row_error)};
}

EnergyBreakdown uniform_level_energy_fast(long n, LogLength r, const EvalPolicy& policy) {
  if (n < 1) throw InvalidArgument("uniform_level_energy_fast: n must be positive");
  const double nd = static_cast<double>(n);
  if (!(r.log() < -std::log(nd))) {
    throw DisjointnessViolation("uniform_level_energy_fast: n * r >= 1 for n = " +
                                std::to_string(n));
  }
  if (policy.mode == EvalMode::Exact) check_exact_range(r.log());
  EnergyBreakdown out;
  out.policy_used = policy;
  out.self_part = (-r.log() + 1.5) / nd;
  if (n == 1) return out;
  const std::size_t pairs = static_cast<std::size_t>(n - 1);
  std::vector<double> value(pairs);
  std::vector<double> error(pairs);
  detail::parallel_for(
      pairs,
      [&](std::size_t idx) {
        const long k = static_cast<long>(idx) + 1;
        const KernelValue kv = pair_kernel(static_cast<double>(k) / nd, r.log(), r.log(), policy);
        const double mult = 2.0 * static_cast<double>(n - k) / (nd * nd);
        value[idx] = mult * kv.value;
        error[idx] = mult * kv.certified_error;
      },
      4096);
  out.cross_part = detail::ordered_sum(value);
  out.certified_error = detail::ordered_sum(error);
  return out;
}

namespace {

// int over |t| <= eps of (c + log|t|) w(t), w the trapezoid density of x - y.
double truncation_correction(double d, double l1, double l2, double c, double eps) {
  const Trapezoid z = trapezoid(d, l1, l2);
  if (z.d - z.p >= eps) return 0.0;
  struct Seg {
    double a, b, wa, wb;
  };
  const double top = 1.0 / z.l;
  const Seg segs[3] = {
      {z.d - z.p, z.d - z.q, 0.0, top},
      {z.d - z.q, z.d + z.q, top, top},
      {z.d + z.q, z.d + z.p, top, 0.0},
  };
  double acc = 0.0;
  for (const Seg& s : segs) {
    if (!(s.b > s.a)) continue;
    const double a = std::max(s.a, -eps);
    const double b = std::min(s.b, eps);
    if (!(b > a)) continue;
    const double span = s.b - s.a;
    const double wa = s.wa + (s.wb - s.wa) * (a - s.a) / span;
    const double wb = s.wa + (s.wb - s.wa) * (b - s.a) / span;
    acc += c * 0.5 * (wa + wb) * (b - a) + lin_log(a, b - a, wa, wb);
  }
  return acc;
}

}  // namespace

double truncated_energy(const StepMeasure& mu, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("truncated_energy: C must be positive and finite");
  }
  const double full = energy(mu, EvalPolicy::automatic()).total();
  const std::size_t n = mu.size();
  const auto g = geometry(mu, EvalPolicy::automatic());
  const auto m = masses(mu);
  const double eps = std::exp(-c);
  std::vector<double> len(n);
  for (std::size_t i = 0; i < n; ++i) {
    len[i] = std::exp(g[i].log_len);
    if (!(len[i] > 0.0)) {
      throw PrecisionError("truncated_energy: piece length below double range");
    }
  }
  std::vector<double> rows(n, 0.0);
  detail::parallel_for(n, [&](std::size_t i) {
    double v = m[i] * truncation_correction(0.0, len[i], len[i], c, eps);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(g[i], g[j]);
      if (d - 0.5 * (len[i] + len[j]) >= eps) continue;
      v += 2.0 * m[j] * truncation_correction(d, len[i], len[j], c, eps);
    }
    rows[i] = m[i] * v;
  });
  return full + detail::ordered_sum(rows);
}

}  // namespace logcap
