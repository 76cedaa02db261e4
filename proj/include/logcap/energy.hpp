#pragma once

#include <string>
#include <utility>
#include <vector>

#include "logcap/interval_sets.hpp"
#include "logcap/log_length.hpp"
#include "logcap/measures.hpp"

namespace logcap {

/// G(t) = t^2/2 log|t| - 3/4 t^2, G(0) = 0, G'' = log|t|.
double kernel_antiderivative(double t);

enum class EvalMode { Exact, PointCharge, Auto };

struct EvalPolicy {
  EvalMode mode = EvalMode::Auto;
  double rho_threshold = 1e-8;

  static EvalPolicy exact() { return {EvalMode::Exact, 0.0}; }
  static EvalPolicy point_charge() { return {EvalMode::PointCharge, 0.0}; }
  static EvalPolicy automatic(double rho_threshold = 1e-8);
  // "exact", "point", "auto" or "auto:1e-6".
  static EvalPolicy parse(const std::string& text);
  std::string tag() const;
};

struct KernelValue {
  double value = 0.0;
  double certified_error = 0.0;
};

struct EnergyBreakdown {
  double self_part = 0.0;
  double cross_part = 0.0;
  double certified_error = 0.0;
  EvalPolicy policy_used;
  double total() const { return self_part + cross_part; }
};

/// Exact mutual energy of the uniform probability measures on two intervals
/// of lengths l1, l2 whose centers are d apart. Overlap is allowed.
double uniform_pair_energy(double d, double l1, double l2);

/// Mutual energy of the normalized uniform measures on J and J'.
KernelValue mutual_energy_const(const Interval& a, const Interval& b, const EvalPolicy& policy);

/// -log(length) + 3/2.
double self_energy_const(LogLength length);
inline double self_energy_const(const Interval& j) { return self_energy_const(j.length()); }

EnergyBreakdown energy(const StepMeasure& mu, const EvalPolicy& policy = EvalPolicy{});

/// Energy of sum_k coef_k mu_k as one double sum over all pieces; pieces of
/// different terms may overlap.
EnergyBreakdown energy_of_sum(const std::vector<std::pair<double, const StepMeasure*>>& terms,
                              const EvalPolicy& policy = EvalPolicy{});

KernelValue mutual_energy(const StepMeasure& mu, const StepMeasure& nu,
                          const EvalPolicy& policy = EvalPolicy{});

/// energy(redistribute(leb, V_n)) in O(n) using that pair energies depend only
/// on |i - j|.
EnergyBreakdown uniform_level_energy_fast(long n, LogLength r,
                                          const EvalPolicy& policy = EvalPolicy{});

/// Energy under the kernel min(-log|x - y|, C).
double truncated_energy(const StepMeasure& mu, double c);

}  // namespace logcap
