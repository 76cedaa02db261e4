#pragma once

#include <optional>
#include <string>
#include <vector>

#include "logcap/interval_sets.hpp"

namespace logcap {

/// Measure with constant density on each piece of an interval union.
///
/// Piece masses are stored as relative weights plus a total mass, so that
/// conditioning on sets of astronomically small length never underflows:
/// mass(i) = total_mass * weight(i) / sum(weights).
class StepMeasure {
 public:
  StepMeasure() = default;
  StepMeasure(IntervalUnion support, std::vector<double> weights, double total_mass = 1.0);

  // Density values per piece; total mass is sum(density * length).
  static StepMeasure from_densities(IntervalUnion support, const std::vector<double>& densities);
  // Lebesgue measure on [0,1].
  static StepMeasure lebesgue();
  // Normalized uniform measure on a union (mass proportional to length).
  static StepMeasure uniform_on(const IntervalUnion& support);

  const IntervalUnion& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }

  double piece_mass(std::size_t i) const { return total_mass_ * weights_[i] / weight_sum_; }
  double log_piece_mass(std::size_t i) const;
  double log_density(std::size_t i) const;
  // May overflow to +inf for pieces below double range; prefer log_density.
  double density(std::size_t i) const;

  bool is_probability(double tol = 1e-12) const;
  StepMeasure scaled(double factor) const;

  friend bool operator==(const StepMeasure& a, const StepMeasure& b);

 private:
  IntervalUnion support_;
  std::vector<double> weights_;
  double weight_sum_ = 0.0;
  double total_mass_ = 0.0;
};

/// Linear combination sum_k coef_k * mu_k. Pieces that overlap pieces of
/// other terms are refined on a common partition; that step uses exact
/// endpoints when available and the double-rounded half-length otherwise
/// (RepresentationError if it underflows). Other pieces are kept as they are.
StepMeasure combine(const std::vector<std::pair<double, const StepMeasure*>>& terms);

/// Conditional measure mu|_Y / mu(Y).
StepMeasure redistribute(const StepMeasure& mu, const IntervalUnion& y);

/// mu(Y) as a natural log (-inf when the mass is zero).
double log_mass_of(const StepMeasure& mu, const IntervalUnion& y);

/// Primes in [m, 2m-1].
struct PrimeWindow {
  long m = 0;
  std::vector<long> primes;
  std::size_t count() const { return primes.size(); }
};

PrimeWindow primes_in_window(long m);

/// One nonnegative weight per element of a prime window, summing to 1.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);
  static WeightVector uniform(std::size_t n);
  // All mass on one index.
  static WeightVector concentrated(std::size_t n, std::size_t index);

  const std::vector<double>& values() const { return w_; }
  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }

 private:
  std::vector<double> w_;
};

/// What to do when two levels of a window share points. For odd primes
/// p != q the pieces of V_p and V_q centered at 1/2 always overlap.
enum class LevelOverlap { Reject, Refine };

/// Convex combination of re-distributions on the levels V_n, n prime in
/// [m, 2m-1]. With Reject, overlapping levels of positive weight raise DisjointnessViolation;
/// with Refine, the overlapping pieces are refined as in combine().
StepMeasure averaged_redistribute(const StepMeasure& mu, long m, const RadiusSchedule& s,
                                  const WeightVector& w,
                                  LevelOverlap overlap = LevelOverlap::Reject);

/// Arcsine (equilibrium) law on [a, b].
struct ArcsineReference {
  double a = 0.0;
  double b = 1.0;
  // log 4 - log(b - a); for [0,1] this is log 4.
  double equilibrium_energy = 0.0;

  double density(double x) const;
  // Mass of [a, x].
  double cdf(double x) const;
};

ArcsineReference arcsine_reference(double a, double b);

/// Energy of the equilibrium measure of [0,1].
inline constexpr double kUnitIntervalEquilibriumEnergy = 1.3862943611198906;  // log 4

/// Continuous densities vanishing at piece endpoints, linear on the first and
/// last delta of each piece and equal to the base density in between.
class CutoffFamily {
 public:
  static CutoffFamily arcsine(double delta);
  // Base is a step density on the pieces of its support.
  static CutoffFamily over_step(StepMeasure base, double delta);

  double delta() const { return delta_; }
  bool is_arcsine() const { return !step_base_.has_value(); }
  const std::optional<StepMeasure>& step_base() const { return step_base_; }

  // The (unnormalized) continuous cut-off density at x.
  double exact_density(double x) const;
  // Mass of the continuous cut-off density.
  double exact_mass() const;

 private:
  double delta_ = 0.0;
  std::optional<StepMeasure> step_base_;
};

/// Step approximation of a cut-off density: `resolution` steps per ramp (and
/// per arcsine base), each valued at its midpoint.
struct CutoffApproximation {
  StepMeasure measure;          // normalized probability measure
  double unnormalized_mass = 0; // Z of the step density before normalization
  double sup_gap = 0;           // sup |step - continuous| before normalization
};

CutoffApproximation cutoff_approximation(const CutoffFamily& c, int resolution);

inline StepMeasure cutoff_step_density(const CutoffFamily& c, int resolution) {
  return cutoff_approximation(c, resolution).measure;
}

}  // namespace logcap
