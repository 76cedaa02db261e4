#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "logcap/log_length.hpp"
#include "logcap/rational.hpp"

namespace logcap {

/// An interval of [0,1] given by an exact center and a log-domain half-length.
///
/// When the half-length is itself a rational (dyadic levels, intervals built
/// from endpoints) it is kept exactly as well, and the endpoints are exact.
/// Otherwise endpoint arithmetic is done in the log domain.
class Interval {
 public:
  static Interval from_endpoints(const Rational& lo, const Rational& hi, bool open = true);
  static Interval centered(const Rational& center, LogLength half_length, bool open = true);
  static Interval centered_exact(const Rational& center, const Rational& half_length,
                                 bool open = true);

  const Rational& center() const { return center_; }
  double center_double() const { return center_double_; }
  LogLength half_length() const { return half_; }
  LogLength length() const { return half_.doubled(); }
  const std::optional<Rational>& exact_half_length() const { return exact_half_; }
  bool has_exact_endpoints() const { return exact_half_.has_value(); }
  bool open() const { return open_; }

  // Exact endpoints; throw RepresentationError unless has_exact_endpoints().
  Rational lo() const;
  Rational hi() const;
  // Endpoints rounded to double, for plotting and export only.
  double lo_double() const;
  double hi_double() const;
  // Exact endpoints when available, otherwise the exact value of the
  // double-rounded half-length around the exact center.
  Rational approx_lo() const;
  Rational approx_hi() const;

 private:
  Interval() = default;
  Rational center_;
  double center_double_ = 0.0;
  LogLength half_;
  std::optional<Rational> exact_half_;
  bool open_ = true;
};

/// Intersection of two intervals; nullopt when they share at most an endpoint.
std::optional<Interval> intersect(const Interval& a, const Interval& b);

/// True iff the two intervals share more than an endpoint.
bool overlaps(const Interval& a, const Interval& b);

/// Finite union of pairwise disjoint intervals, sorted by center.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  // Sorts by center and throws DisjointnessViolation on overlap.
  explicit IntervalUnion(std::vector<Interval> pieces);

  const std::vector<Interval>& pieces() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  const Interval& operator[](std::size_t i) const { return pieces_[i]; }

  // Total length; empty union has no LogLength.
  std::optional<LogLength> total_length() const;
  // Exact Lebesgue measure; requires exact endpoints on every piece.
  Rational exact_total_length() const;
  bool all_exact() const;

 private:
  std::vector<Interval> pieces_;
};

/// Merge unions whose pieces are mutually disjoint (DisjointnessViolation
/// otherwise).
IntervalUnion merge_disjoint(const std::vector<const IntervalUnion*>& parts);

/// Schedule n -> r_n of interval lengths.
class RadiusSchedule {
 public:
  enum class Kind { PowerExp, SubexpRoot, GeometricDyadic, Custom };

  // log r_n = -n^alpha.
  static RadiusSchedule power_exp(double alpha);
  // log r_n = -n^beta, beta < 1.
  static RadiusSchedule subexp_root(double beta);
  // r_n = 2^-n.
  static RadiusSchedule geometric_dyadic();
  // Table of (n, log r_n); no interpolation.
  static RadiusSchedule custom(std::map<long, double> log_radii);
  // "powerexp:1.5", "subexp:0.5", "dyadic".
  static RadiusSchedule parse(const std::string& text);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  std::string describe() const;

  LogLength radius(long n) const;
  // Exact length when the schedule yields rationals.
  std::optional<Rational> exact_radius(long n) const;
  // r_n < 1/n, the condition for V_n to have disjoint pieces.
  bool admissible(long n) const;

 private:
  Kind kind_ = Kind::PowerExp;
  double param_ = 1.0;
  std::map<long, double> table_;
};

inline LogLength schedule_radius(const RadiusSchedule& s, long n) { return s.radius(n); }

/// V_n: n open intervals of length exp(r), the i-th centered at (2i+1)/(2n).
IntervalUnion make_uniform_level(long n, LogLength length);
/// Same with an exact rational length, giving exact endpoints.
IntervalUnion make_uniform_level(long n, const Rational& length);
/// V_n for a schedule, exact whenever the schedule is.
IntervalUnion make_level(const RadiusSchedule& s, long n);

/// a minus the closure of b.
IntervalUnion set_difference_closed(const IntervalUnion& a, const IntervalUnion& b);

/// k-th output is intervals[k] minus the union of all earlier inputs.
std::vector<IntervalUnion> disjointify(const std::vector<Interval>& intervals);

/// Union of two arbitrary interval lists as a disjoint union (exact endpoints).
IntervalUnion union_of(const std::vector<Interval>& intervals);

/// min |c_{i,p} - c_{j,q}| over the centers of levels p and q.
Rational min_center_gap(long p, long q);

/// Index pairs (i < j) of overlapping intervals in an arbitrary list.
std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(
    const std::vector<Interval>& items);

/// True iff no piece of a meets a piece of b (log-domain radii).
bool unions_disjoint(const IntervalUnion& a, const IntervalUnion& b);

}  // namespace logcap
