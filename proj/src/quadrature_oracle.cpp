#include "logcap/quadrature_oracle.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

constexpr double kTarget = 1e-8;

boost::math::quadrature::tanh_sinh<double>& integrator() {
  thread_local boost::math::quadrature::tanh_sinh<double> q(15);
  return q;
}

// Integrate f over [a, b], split at the interior points of `cuts`.
template <class F>
double integrate_split(F f, double a, double b, std::vector<double> cuts, double* err_acc) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = std::max(a, cuts[k]);
    const double hi = std::min(b, cuts[k + 1]);
    if (!(hi > lo)) continue;
    double err = 0.0;
    double l1 = 0.0;
    total += integrator().integrate(f, lo, hi, 1e-12, &err, &l1);
    *err_acc += err * (hi - lo);
  }
  return total;
}

}  // namespace

double quadrature_oracle_pair(double a0, double a1, double b0, double b1) {
  if (!(a1 - a0 >= 0.999999e-6 && b1 - b0 >= 0.999999e-6)) {
    throw InvalidArgument("quadrature_oracle: piece lengths must be at least 1e-6");
  }
  // Local coordinates x = a0 + u, y = b0 + v keep small pieces resolved.
  const double la = a1 - a0;
  const double lb = b1 - b0;
  const double off = a0 - b0;
  double inner_err = 0.0;
  auto inner = [&](double v) {
    const double sing = v - off;  // u where x == y
    auto k = [&](double u) {
      const double t = std::fabs(off + u - v);
      return t > 0.0 ? -std::log(t) : 0.0;
    };
    std::vector<double> cuts;
    if (sing > 0.0 && sing < la) cuts.push_back(sing);
    double e = 0.0;
    const double val = integrate_split(k, 0.0, la, cuts, &e);
    inner_err = std::max(inner_err, e);
    return val;
  };
  std::vector<double> cuts;
  if (off > 0.0 && off < lb) cuts.push_back(off);
  if (off + la > 0.0 && off + la < lb) cuts.push_back(off + la);
  double outer_err = 0.0;
  const double raw = integrate_split(inner, 0.0, lb, cuts, &outer_err);
  const double scale = la * lb;
  const double err = (outer_err + inner_err * lb) / scale;
  if (!std::isfinite(raw) || err > kTarget) {
    throw OracleFailure("quadrature_oracle: error estimate above target");
  }
  return raw / scale;
}

double quadrature_oracle(const StepMeasure& mu, const StepMeasure& nu) {
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double mi = mu.piece_mass(i);
    if (mi == 0.0) continue;
    const auto& p = mu.support()[i];
    for (std::size_t j = 0; j < nu.size(); ++j) {
      const double nj = nu.piece_mass(j);
      if (nj == 0.0) continue;
      const auto& q = nu.support()[j];
      total += mi * nj *
               quadrature_oracle_pair(p.lo_double(), p.hi_double(), q.lo_double(), q.hi_double());
    }
  }
  return total;
}

double quadrature_mass(double (*density)(double), double a, double b) {
  double err = 0.0;
  double l1 = 0.0;
  const double v = integrator().integrate(density, a, b, 1e-12, &err, &l1);
  if (err > kTarget) throw OracleFailure("quadrature_mass: error estimate above target");
  return v;
}

}  // namespace logcap
