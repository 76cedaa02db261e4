#include "logcap/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

double sum_of(const std::vector<double>& v) {
  // Neumaier summation keeps relative weights reproducible to the last bit.
  double s = 0.0;
  double c = 0.0;
  for (double x : v) {
    double t = s + x;
    c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

// Sign of hi(a) - hi(b), computed exactly or in the log domain.
int compare_hi(const Interval& a, const Interval& b) {
  if (a.has_exact_endpoints() && b.has_exact_endpoints()) {
    auto c = a.hi() <=> b.hi();
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  // hi(a) - hi(b) = d + ha - hb with d = ca - cb
  const Rational d = a.center() - b.center();
  const double la = a.half_length().log();
  const double lb = b.half_length().log();
  double lhs;
  double rhs;
  if (d.sign() >= 0) {
    lhs = d.sign() == 0 ? la : log_add_exp(d.log_abs(), la);
    rhs = lb;
  } else {
    lhs = la;
    rhs = log_add_exp(d.log_abs(), lb);
  }
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

struct PieceContribution {
  Interval piece;
  double parent_weight;
  double log_ratio;  // log(|piece| / |parent|)
};

}  // namespace

// ---------------------------------------------------------------------------

StepMeasure::StepMeasure(IntervalUnion support, std::vector<double> weights, double total_mass)
    : support_(std::move(support)), weights_(std::move(weights)), total_mass_(total_mass) {
  if (weights_.size() != support_.size()) {
    throw InvalidArgument("StepMeasure: one weight per piece required");
  }
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidArgument("StepMeasure: weights must be finite and nonnegative");
    }
  }
  if (!(total_mass_ >= 0.0) || !std::isfinite(total_mass_)) {
    throw InvalidArgument("StepMeasure: total mass must be finite and nonnegative");
  }
  weight_sum_ = sum_of(weights_);
  if (!support_.empty() && !(weight_sum_ > 0.0) && total_mass_ > 0.0) {
    throw ZeroMassError("StepMeasure: all weights are zero");
  }
  if (support_.empty() && total_mass_ > 0.0) {
    throw ZeroMassError("StepMeasure: positive mass on an empty support");
  }
}

StepMeasure StepMeasure::from_densities(IntervalUnion support,
                                        const std::vector<double>& densities) {
  if (densities.size() != support.size()) {
    throw InvalidArgument("StepMeasure: one density per piece required");
  }
  std::vector<double> masses(densities.size());
  for (std::size_t i = 0; i < densities.size(); ++i) {
    const double d = densities[i];
    if (!(d >= 0.0) || !std::isfinite(d)) {
      throw InvalidArgument("StepMeasure: densities must be finite and nonnegative");
    }
    masses[i] = d == 0.0 ? 0.0 : std::exp(std::log(d) + support[i].length().log());
  }
  const double total = sum_of(masses);
  return StepMeasure(std::move(support), std::move(masses), total);
}

StepMeasure StepMeasure::lebesgue() {
  IntervalUnion u({Interval::from_endpoints(Rational(0), Rational(1), false)});
  return StepMeasure(std::move(u), {1.0}, 1.0);
}

StepMeasure StepMeasure::uniform_on(const IntervalUnion& support) {
  if (support.empty()) throw ZeroMassError("uniform_on: empty support");
  double mx = -INFINITY;
  for (const auto& p : support.pieces()) mx = std::max(mx, p.length().log());
  std::vector<double> w;
  w.reserve(support.size());
  for (const auto& p : support.pieces()) w.push_back(std::exp(p.length().log() - mx));
  return StepMeasure(support, std::move(w), 1.0);
}

double StepMeasure::log_piece_mass(std::size_t i) const {
  if (weights_[i] == 0.0 || total_mass_ == 0.0) return -INFINITY;
  return std::log(total_mass_) + std::log(weights_[i]) - std::log(weight_sum_);
}

double StepMeasure::log_density(std::size_t i) const {
  return log_piece_mass(i) - support_[i].length().log();
}

double StepMeasure::density(std::size_t i) const { return std::exp(log_density(i)); }

bool StepMeasure::is_probability(double tol) const { return std::fabs(total_mass_ - 1.0) <= tol; }

StepMeasure StepMeasure::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw InvalidArgument("StepMeasure::scaled: factor must be finite and nonnegative");
  }
  return StepMeasure(support_, weights_, total_mass_ * factor);
}

bool operator==(const StepMeasure& a, const StepMeasure& b) {
  if (a.size() != b.size() || a.total_mass_ != b.total_mass_) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Interval& p = a.support_[i];
    const Interval& q = b.support_[i];
    if (!(p.center() == q.center()) || p.half_length() != q.half_length()) return false;
    if (p.exact_half_length() != q.exact_half_length()) return false;
    if (a.weights_[i] / a.weight_sum_ != b.weights_[i] / b.weight_sum_) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

StepMeasure combine(const std::vector<std::pair<double, const StepMeasure*>>& terms) {
  std::vector<Interval> items;
  std::vector<double> item_mass;
  double total = 0.0;
  for (const auto& [coef, mu] : terms) {
    if (!(coef >= 0.0) || !std::isfinite(coef)) {
      throw InvalidArgument("combine: coefficients must be finite and nonnegative");
    }
    if (coef == 0.0 || mu->total_mass() == 0.0) continue;
    total += coef * mu->total_mass();
    for (std::size_t i = 0; i < mu->size(); ++i) {
      const double m = coef * mu->piece_mass(i);
      if (m > 0.0) {
        items.push_back(mu->support()[i]);
        item_mass.push_back(m);
      }
    }
  }
  if (items.empty()) return StepMeasure();

  // Clusters of mutually overlapping pieces (union-find).
  std::vector<std::size_t> parent(items.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [a, b] : overlapping_pairs(items)) parent[find(a)] = find(b);
  std::map<std::size_t, std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < items.size(); ++i) clusters[find(i)].push_back(i);

  std::vector<Interval> pieces;
  std::vector<double> masses;
  for (const auto& [root, members] : clusters) {
    if (members.size() == 1) {
      pieces.push_back(items[members[0]]);
      masses.push_back(item_mass[members[0]]);
      continue;
    }
    // Common refinement; endpoints are exact when the pieces have them.
    std::vector<Rational> cuts;
    for (std::size_t i : members) {
      cuts.push_back(items[i].approx_lo());
      cuts.push_back(items[i].approx_hi());
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const std::size_t nseg = cuts.size() - 1;
    std::vector<double> seg_mass(nseg, 0.0);
    for (std::size_t i : members) {
      const Rational lo = items[i].approx_lo();
      const Rational hi = items[i].approx_hi();
      const Rational len = hi - lo;
      auto k = static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), lo) -
                                        cuts.begin());
      for (; k < nseg && cuts[k] < hi; ++k) {
        seg_mass[k] += item_mass[i] * ((cuts[k + 1] - cuts[k]) / len).to_double();
      }
    }
    for (std::size_t k = 0; k < nseg; ++k) {
      if (seg_mass[k] == 0.0) continue;
      pieces.push_back(Interval::from_endpoints(cuts[k], cuts[k + 1], true));
      masses.push_back(seg_mass[k]);
    }
  }

  std::vector<std::size_t> order(pieces.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pieces[a].center_double() != pieces[b].center_double())
      return pieces[a].center_double() < pieces[b].center_double();
    return pieces[a].center() < pieces[b].center();
  });
  std::vector<Interval> sorted;
  std::vector<double> w;
  for (std::size_t i : order) {
    sorted.push_back(pieces[i]);
    w.push_back(masses[i]);
  }
  return StepMeasure(IntervalUnion(std::move(sorted)), std::move(w), total);
}

namespace {

std::vector<PieceContribution> intersect_with(const StepMeasure& mu, const IntervalUnion& y) {
  std::vector<PieceContribution> out;
  const auto& P = mu.support().pieces();
  const auto& Q = y.pieces();
  std::size_t i = 0;
  std::size_t j = 0;
  // Both lists are sorted and disjoint: a standard two-pointer sweep.
  while (i < P.size() && j < Q.size()) {
    if (mu.weights()[i] > 0.0) {
      if (auto inter = intersect(P[i], Q[j])) {
        out.push_back({*inter, mu.weights()[i],
                       inter->length().log() - P[i].length().log()});
      }
    }
    if (compare_hi(Q[j], P[i]) <= 0) {
      ++j;
    } else {
      ++i;
    }
  }
  return out;
}

}  // namespace

double log_mass_of(const StepMeasure& mu, const IntervalUnion& y) {
  if (mu.total_mass() == 0.0) return -INFINITY;
  auto parts = intersect_with(mu, y);
  if (parts.empty()) return -INFINITY;
  double mx = -INFINITY;
  for (const auto& c : parts) mx = std::max(mx, std::log(c.parent_weight) + c.log_ratio);
  std::vector<double> terms;
  for (const auto& c : parts) terms.push_back(std::exp(std::log(c.parent_weight) + c.log_ratio - mx));
  const double wsum = sum_of(mu.weights());
  return mx + std::log(sum_of(terms)) + std::log(mu.total_mass()) - std::log(wsum);
}

StepMeasure redistribute(const StepMeasure& mu, const IntervalUnion& y) {
  auto parts = intersect_with(mu, y);
  if (parts.empty() || mu.total_mass() == 0.0) {
    throw ZeroMassError("redistribute: mu(Y) = 0");
  }
  // Relative weights w_parent * |piece|/|parent|, shifted by the largest
  // log ratio; a piece equal to its parent keeps its weight bit for bit.
  double shift = -INFINITY;
  for (const auto& c : parts) shift = std::max(shift, c.log_ratio);
  std::vector<double> w;
  w.reserve(parts.size());
  bool lost = false;
  for (const auto& c : parts) {
    const double e = c.log_ratio - shift;
    double v = e == 0.0 ? c.parent_weight : c.parent_weight * std::exp(e);
    if (v == 0.0 || !std::isfinite(v)) lost = true;
    w.push_back(v);
  }
  if (lost) {
    double mx = -INFINITY;
    for (const auto& c : parts) mx = std::max(mx, std::log(c.parent_weight) + c.log_ratio);
    for (std::size_t k = 0; k < parts.size(); ++k) {
      w[k] = std::exp(std::log(parts[k].parent_weight) + parts[k].log_ratio - mx);
    }
  }
  std::vector<Interval> pieces;
  std::vector<double> kept;
  pieces.reserve(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (w[k] > 0.0) {
      pieces.push_back(parts[k].piece);
      kept.push_back(w[k]);
    }
  }
  if (pieces.empty()) throw ZeroMassError("redistribute: mu(Y) = 0");
  return StepMeasure(IntervalUnion(std::move(pieces)), std::move(kept), 1.0);
}

// ---------------------------------------------------------------------------

PrimeWindow primes_in_window(long m) {
  if (m < 2) throw InvalidArgument("primes_in_window: m must be at least 2");
  const long top = 2 * m - 1;
  std::vector<char> composite(static_cast<std::size_t>(top) + 1, 0);
  for (long p = 2; p * p <= top; ++p) {
    if (composite[p]) continue;
    for (long k = p * p; k <= top; k += p) composite[k] = 1;
  }
  PrimeWindow w;
  w.m = m;
  for (long n = m; n <= top; ++n) {
    if (n >= 2 && !composite[n]) w.primes.push_back(n);
  }
  return w;
}

WeightVector::WeightVector(std::vector<double> weights) : w_(std::move(weights)) {
  if (w_.empty()) throw InvalidArgument("WeightVector: empty");
  for (double x : w_) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("WeightVector: weights must be finite and nonnegative");
    }
  }
  const double s = sum_of(w_);
  if (std::fabs(s - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "WeightVector: weights sum to " << s << ", expected 1";
    throw InvalidArgument(msg.str());
  }
}

WeightVector WeightVector::uniform(std::size_t n) {
  if (n == 0) throw InvalidArgument("WeightVector: empty");
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

WeightVector WeightVector::concentrated(std::size_t n, std::size_t index) {
  if (index >= n) throw InvalidArgument("WeightVector: index out of range");
  std::vector<double> w(n, 0.0);
  w[index] = 1.0;
  return WeightVector(std::move(w));
}

StepMeasure averaged_redistribute(const StepMeasure& mu, long m, const RadiusSchedule& s,
                                  const WeightVector& w, LevelOverlap overlap) {
  const PrimeWindow window = primes_in_window(m);
  if (w.size() != window.count()) {
    throw InvalidArgument("averaged_redistribute: " + std::to_string(w.size()) +
                          " weights for " + std::to_string(window.count()) + " primes");
  }
  std::vector<IntervalUnion> levels;
  levels.reserve(window.count());
  for (long n : window.primes) levels.push_back(make_level(s, n));
  // Only levels carrying weight are part of the support.
  if (overlap == LevelOverlap::Reject) {
    for (std::size_t a = 0; a < levels.size(); ++a) {
      for (std::size_t b = a + 1; b < levels.size(); ++b) {
        if (w[a] == 0.0 || w[b] == 0.0) continue;
        if (!unions_disjoint(levels[a], levels[b])) {
          throw DisjointnessViolation(
              "averaged_redistribute: levels V_" + std::to_string(window.primes[a]) + " and V_" +
              std::to_string(window.primes[b]) + " overlap (window m = " + std::to_string(m) + ")");
        }
      }
    }
  }
  std::vector<StepMeasure> parts;
  std::vector<std::pair<double, const StepMeasure*>> terms;
  parts.reserve(window.count());
  for (std::size_t k = 0; k < window.count(); ++k) {
    if (w[k] == 0.0) continue;
    try {
      parts.push_back(redistribute(mu, levels[k]));
    } catch (const ZeroMassError&) {
      throw ZeroMassError("averaged_redistribute: mu(V_n) = 0 for n = " +
                          std::to_string(window.primes[k]));
    }
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < window.count(); ++k) {
    if (w[k] == 0.0) continue;
    terms.emplace_back(w[k], &parts[idx++]);
  }
  return combine(terms);
}

// ---------------------------------------------------------------------------

ArcsineReference arcsine_reference(double a, double b) {
  if (!(a < b)) throw InvalidArgument("arcsine_reference: requires a < b");
  ArcsineReference r;
  r.a = a;
  r.b = b;
  r.equilibrium_energy = std::log(4.0) - std::log(b - a);
  return r;
}

double ArcsineReference::density(double x) const {
  if (!(x > a && x < b)) return 0.0;
  return 1.0 / (M_PI * std::sqrt((x - a) * (b - x)));
}

double ArcsineReference::cdf(double x) const {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return 2.0 / M_PI * std::asin(std::sqrt((x - a) / (b - a)));
}

namespace {

double arcsine01(double x) { return 1.0 / (M_PI * std::sqrt(x * (1.0 - x))); }

}  // namespace

CutoffFamily CutoffFamily::arcsine(double delta) {
  if (!(delta > 0.0 && delta < 0.5)) {
    throw InvalidCutoff("cutoff: delta must lie in (0, 1/2) for the arcsine base");
  }
  CutoffFamily c;
  c.delta_ = delta;
  return c;
}

CutoffFamily CutoffFamily::over_step(StepMeasure base, double delta) {
  if (!(delta > 0.0)) throw InvalidCutoff("cutoff: delta must be positive");
  if (base.size() == 0) throw InvalidCutoff("cutoff: empty base");
  for (const auto& p : base.support().pieces()) {
    if (!p.has_exact_endpoints()) throw InvalidCutoff("cutoff: base pieces need exact endpoints");
    if (!(Rational::from_double(delta) < *p.exact_half_length())) {
      throw InvalidCutoff("cutoff: delta must be below half the shortest piece");
    }
  }
  CutoffFamily c;
  c.delta_ = delta;
  c.step_base_ = std::move(base);
  return c;
}

double CutoffFamily::exact_density(double x) const {
  const double d = delta_;
  if (!step_base_) {
    if (!(x > 0.0 && x < 1.0)) return 0.0;
    if (x < d) return x / d * arcsine01(d);
    if (x > 1.0 - d) return (1.0 - x) / d * arcsine01(d);
    return arcsine01(x);
  }
  const auto& mu = *step_base_;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double lo = mu.support()[i].lo_double();
    const double hi = mu.support()[i].hi_double();
    if (x <= lo || x >= hi) continue;
    const double f = mu.density(i);
    if (x < lo + d) return (x - lo) / d * f;
    if (x > hi - d) return (hi - x) / d * f;
    return f;
  }
  return 0.0;
}

double CutoffFamily::exact_mass() const {
  const double d = delta_;
  if (!step_base_) {
    // Two ramps of height f(d) and the arcsine mass of [d, 1-d].
    const double ramps = d * arcsine01(d);
    const double middle = 1.0 - 4.0 / M_PI * std::asin(std::sqrt(d));
    return ramps + middle;
  }
  const auto& mu = *step_base_;
  double z = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    z += mu.piece_mass(i) - d * mu.density(i);
  }
  return z;
}

CutoffApproximation cutoff_approximation(const CutoffFamily& c, int resolution) {
  if (resolution < 1) throw InvalidArgument("cutoff: resolution must be at least 1");
  const int k = resolution;
  const Rational delta = Rational::from_double(c.delta());

  std::vector<Interval> pieces;
  std::vector<double> masses;
  double gap = 0.0;

  auto add = [&](const Rational& lo, const Rational& hi, double value, double edge_lo,
                 double edge_hi) {
    pieces.push_back(Interval::from_endpoints(lo, hi, true));
    masses.push_back(value * (hi - lo).to_double());
    gap = std::max({gap, std::fabs(value - edge_lo), std::fabs(value - edge_hi)});
  };

  // Ramp of k steps rising from 0 at `start` to `top` at start + delta, or
  // falling when `rising` is false.
  auto ramp = [&](const Rational& start, double top, bool rising) {
    for (int s = 0; s < k; ++s) {
      const Rational lo = start + delta * Rational(s, k);
      const Rational hi = start + delta * Rational(s + 1, k);
      const double a = static_cast<double>(rising ? s : k - s) / k;
      const double b = static_cast<double>(rising ? s + 1 : k - s - 1) / k;
      add(lo, hi, 0.5 * (a + b) * top, a * top, b * top);
    }
  };

  if (c.is_arcsine()) {
    const double top = arcsine01(c.delta());
    const Rational right = Rational(1) - delta;
    ramp(Rational(0), top, true);
    // Base part on [delta, 1 - delta], graded through x = (1 - cos t)/2.
    const double t0 = std::acos(1.0 - 2.0 * c.delta());
    const double t1 = M_PI - t0;
    std::vector<Rational> cuts{delta};
    for (int s = 1; s < k; ++s) {
      const double t = t0 + (t1 - t0) * s / k;
      Rational x = Rational::from_double(0.5 * (1.0 - std::cos(t)));
      if (cuts.back() < x && x < right) cuts.push_back(x);
    }
    cuts.push_back(right);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double lo = cuts[s].to_double();
      const double hi = cuts[s + 1].to_double();
      add(cuts[s], cuts[s + 1], arcsine01(0.5 * (lo + hi)), arcsine01(lo), arcsine01(hi));
    }
    ramp(right, top, false);
  } else {
    const auto& mu = *c.step_base();
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Interval& p = mu.support()[i];
      const double f = mu.density(i);
      ramp(p.lo(), f, true);
      const Rational a = p.lo() + delta;
      const Rational b = p.hi() - delta;
      add(a, b, f, f, f);
      ramp(b, f, false);
    }
  }

  CutoffApproximation out;
  out.unnormalized_mass = sum_of(masses);
  out.sup_gap = gap;
  out.measure = StepMeasure(IntervalUnion(std::move(pieces)), std::move(masses), 1.0);
  return out;
}

}  // namespace logcap
