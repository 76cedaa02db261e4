#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "logcap/interval_sets.hpp"
#include "logcap/log_length.hpp"

namespace logcap {

/// Lengths of covering intervals, optionally with their positions.
struct CoverDescription {
  std::vector<LogLength> lengths;
  std::optional<std::vector<Rational>> centers;

  static CoverDescription from_union(const IntervalUnion& u);
  // Every length must be < 1.
  void validate() const;
};

/// 1 / sum_k 1/|log r_k|.
double cs_lower_energy_bound(const CoverDescription& cover);

/// exp(-1/series), 1 when the series is infinite, clamped to [0, 1].
double capacity_bound_from_series(double series);

/// exp(-cs_lower_energy_bound(cover)).
double capacity_upper_bound(const CoverDescription& cover);

struct BoundReport {
  double energy_lower_bound = 0.0;
  double capacity_upper_bound = 1.0;
  double series_value = 0.0;
  bool converged = true;
};

BoundReport bound_report(const CoverDescription& cover);

/// sum_{n >= m} n^(1 - alpha) as a partial sum plus an integral-test bracket
/// on the remainder.
struct TailSeries {
  double alpha = 0.0;
  long m = 0;
  long terms = 0;
  double partial_sum = 0.0;
  double remainder_lower = 0.0;
  double remainder_upper = 0.0;  // +inf when divergent
  bool converged = false;

  double lower() const { return partial_sum + remainder_lower; }
  double upper() const { return partial_sum + remainder_upper; }
};

TailSeries tail_series(double alpha, long m, long terms);
// The schedule must be PowerExp.
TailSeries tail_series(const RadiusSchedule& s, long m, long terms);

/// Bound report for the tail cover of a PowerExp schedule from level m on;
/// uses the upper end of the series bracket so the bound stays rigorous.
BoundReport tail_capacity_bound(const TailSeries& t);

/// A measuring function r -> h(r), handled through the doubly logarithmic
/// variable u = log|log r| so that r may be doubly exponentially small.
class MeasuringFunction {
 public:
  using LogEval = std::function<double(double)>;
  enum class Kind { H0, LogLog, Power, Custom };

  // log_h maps u = log|log r| to log h(r).
  MeasuringFunction(std::string name, LogEval log_h);

  static MeasuringFunction h0();        // 1/|log r|
  static MeasuringFunction loglog();    // 1/(|log r| log|log r|), needs |log r| > e
  static MeasuringFunction identity();  // r
  static MeasuringFunction power(double a);  // r^a

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  double parameter() const { return param_; }

  double log_h_at(double log_abs_log_r) const;
  double log_h(LogLength r) const { return log_h_at(std::log(r.abs_log())); }
  double operator()(LogLength r) const { return std::exp(log_h(r)); }

 private:
  std::string name_;
  LogEval log_h_;
  Kind kind_ = Kind::Custom;
  double param_ = 0.0;
};

/// sum_j h(r_j); throws InvalidArgument if h is nonpositive somewhere.
double h_volume_upper(const CoverDescription& cover, const MeasuringFunction& h);

struct UrsellRow {
  int j = 0;
  double log_abs_log_r = 0.0;  // log|log r_j|
  double log_h = 0.0;          // log h(r_j)
  double log_n = 0.0;          // log n_j
  std::string n_decimal;       // n_j exactly, when it has at most 60 digits
  double log_nh = 0.0;         // log(n_j h(r_j)), must be < -j log 2
  double log_n_over_abs_log_r = 0.0;  // must be > j log 2
  bool accepted = false;
  bool verified_wide = false;
  std::string reason;
};

struct UrsellSchedule {
  std::string h_name;
  std::vector<UrsellRow> rows;
  // Partial sums of n_j h(r_j) over accepted rows.
  std::vector<double> h_volume_partial_sums;
  std::size_t accepted_count() const;
};

/// Builds n_j = floor(sqrt(|log r_j| / h(r_j))) for the witness values
/// u_j = log|log r_j|, j = 1..J. The witness must satisfy
/// h(r_j)|log r_j| <= 4^(-j-1) (PreconditionError naming j otherwise).
UrsellSchedule ursell_schedule(const MeasuringFunction& h,
                               const std::vector<double>& witness_log_abs_log_r, int count);

/// u_j = log|log r_j| = 4^(j+1), i.e. r_j = exp(-exp(4^(j+1))), j = 1..count.
std::vector<double> doubly_exponential_witness(int count);

enum class Phase { ZeroCapacity, FullCapacity, OpenBoundary };

Phase phase_classify(double alpha);
std::string phase_name(Phase p);

}  // namespace logcap
