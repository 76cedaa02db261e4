#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "logcap/energy.hpp"
#include "logcap/interval_sets.hpp"
#include "logcap/measures.hpp"
#include "logcap/result_table.hpp"

namespace logcap {

struct ConvergenceConfig {
  RadiusSchedule schedule = RadiusSchedule::subexp_root(0.5);
  std::vector<long> n_grid{100, 1000, 10000, 100000};
  EvalPolicy policy;
  // Base density; Lebesgue measure on [0,1] when empty.
  std::optional<StepMeasure> density;
};

/// Energies of R(mu | V_n) along an n-grid.
ResultTable run_redistribution_convergence(const ConvergenceConfig& cfg);

enum class BaseMeasure { Uniform, ArcsineCutoff };

struct AveragedConfig {
  double alpha = 1.5;
  std::vector<long> m_grid{16, 64, 256, 1024};
  long pairs = 50;
  bool full_pairs = false;
  std::uint64_t seed = 1;
  EvalPolicy policy;
  // All weight on this prime (must lie in every window) instead of uniform.
  std::optional<long> concentrate_on;
  BaseMeasure base = BaseMeasure::Uniform;
  double cutoff_delta = 1e-3;
  int cutoff_resolution = 64;
  bool verify_expansion = true;
  // Reject throws DisjointnessViolation when two levels share points;
  // Refine computes anyway and reports the overlap in the table.
  LevelOverlap on_overlap = LevelOverlap::Reject;
};

struct AveragedResult {
  ResultTable summary;
  ResultTable pairs;
};

/// Energies of the prime-window averages sum_n p_n R(mu | V_n).
AveragedResult run_averaged_convergence(const AveragedConfig& cfg);

struct PhaseConfig {
  std::vector<double> alpha_grid{1.5, 2.0, 3.0};
  // Tail start points for the bound rows.
  std::vector<long> m_grid{1, 10, 100, 1000};
  long terms = 100000;
  // Window sizes for the low-energy evidence rows (alpha < 2).
  std::vector<long> evidence_m_grid{16, 64, 256};
  long evidence_pairs = 20;
  std::uint64_t seed = 1;
  double cutoff_delta = 1e-3;
  int cutoff_resolution = 64;
};

ResultTable run_phase_scan(const PhaseConfig& cfg);

struct CounterexampleParams {
  long n1 = 8;
  int depth = 2;
};

ResultTable run_counterexample_check(const CounterexampleParams& params);

}  // namespace logcap
