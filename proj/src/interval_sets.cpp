#include "logcap/interval_sets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "logcap/errors.hpp"

namespace logcap {

namespace {

bool center_less(const Interval& a, const Interval& b) {
  if (a.center_double() != b.center_double()) return a.center_double() < b.center_double();
  return a.center() < b.center();
}

struct Range {
  Rational lo;
  Rational hi;
};

// Subtract the closed range [cut.lo, cut.hi] from each open segment.
std::vector<Range> subtract(const std::vector<Range>& segments, const Range& cut) {
  std::vector<Range> out;
  for (const auto& s : segments) {
    if (!(cut.lo < s.hi && s.lo < cut.hi)) {
      out.push_back(s);
      continue;
    }
    if (s.lo < cut.lo) out.push_back({s.lo, cut.lo});
    if (cut.hi < s.hi) out.push_back({cut.hi, s.hi});
  }
  return out;
}

// Insert [r.lo, r.hi] into a sorted list of disjoint closed ranges, merging.
void insert_merged(std::vector<Range>& covered, const Range& r) {
  std::vector<Range> out;
  Range cur = r;
  bool placed = false;
  for (const auto& c : covered) {
    if (c.hi < cur.lo) {
      out.push_back(c);
    } else if (cur.hi < c.lo) {
      if (!placed) {
        out.push_back(cur);
        placed = true;
      }
      out.push_back(c);
    } else {
      cur.lo = min(cur.lo, c.lo);
      cur.hi = max(cur.hi, c.hi);
    }
  }
  if (!placed) out.push_back(cur);
  covered.swap(out);
}

}  // namespace

Interval Interval::from_endpoints(const Rational& lo, const Rational& hi, bool open) {
  if (!(lo < hi)) throw InvalidArgument("Interval: requires lo < hi");
  if (lo < Rational(0) || Rational(1) < hi) {
    throw InvalidArgument("Interval: endpoints must lie in [0,1]");
  }
  Rational two(2);
  return centered_exact((lo + hi) / two, (hi - lo) / two, open);
}

Interval Interval::centered(const Rational& center, LogLength half_length, bool open) {
  if (center < Rational(0) || Rational(1) < center) {
    throw InvalidArgument("Interval: center must lie in [0,1]");
  }
  Interval iv;
  iv.center_ = center;
  iv.center_double_ = center.to_double();
  iv.half_ = half_length;
  iv.open_ = open;
  return iv;
}

Interval Interval::centered_exact(const Rational& center, const Rational& half_length,
                                  bool open) {
  if (half_length.sign() <= 0) throw InvalidArgument("Interval: half-length must be positive");
  Interval iv = centered(center, LogLength::from_log(half_length.log_abs()), open);
  iv.exact_half_ = half_length;
  return iv;
}

Rational Interval::lo() const {
  if (!exact_half_) throw RepresentationError("Interval::lo: endpoints are not exact");
  return center_ - *exact_half_;
}

Rational Interval::hi() const {
  if (!exact_half_) throw RepresentationError("Interval::hi: endpoints are not exact");
  return center_ + *exact_half_;
}

double Interval::lo_double() const {
  return exact_half_ ? lo().to_double() : center_double_ - half_.value();
}

double Interval::hi_double() const {
  return exact_half_ ? hi().to_double() : center_double_ + half_.value();
}

Rational Interval::approx_lo() const {
  if (exact_half_) return lo();
  double h = half_.value();
  if (!(h > 0.0)) {
    throw RepresentationError("Interval: half-length underflows; endpoints not representable");
  }
  return center_ - Rational::from_double(h);
}

Rational Interval::approx_hi() const {
  if (exact_half_) return hi();
  double h = half_.value();
  if (!(h > 0.0)) {
    throw RepresentationError("Interval: half-length underflows; endpoints not representable");
  }
  return center_ + Rational::from_double(h);
}

bool overlaps(const Interval& a, const Interval& b) {
  if (a.has_exact_endpoints() && b.has_exact_endpoints()) {
    return a.lo() < b.hi() && b.lo() < a.hi();
  }
  Rational d = (a.center() - b.center()).abs();
  if (d.sign() == 0) return true;
  return d.log_abs() < log_add_exp(a.half_length().log(), b.half_length().log());
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  if (a.has_exact_endpoints() && b.has_exact_endpoints()) {
    Rational lo = max(a.lo(), b.lo());
    Rational hi = min(a.hi(), b.hi());
    if (!(lo < hi)) return std::nullopt;
    if (lo == a.lo() && hi == a.hi()) return a;
    if (lo == b.lo() && hi == b.hi()) return b;
    return Interval::from_endpoints(lo, hi, a.open() || b.open());
  }
  const double la = a.half_length().log();
  const double lb = b.half_length().log();
  Rational d = (a.center() - b.center()).abs();
  if (d.sign() == 0) return la <= lb ? a : b;
  const double log_d = d.log_abs();
  if (log_d >= log_add_exp(la, lb)) return std::nullopt;
  if (lb < la && log_d <= log_sub_exp(la, lb)) return b;
  if (la < lb && log_d <= log_sub_exp(lb, la)) return a;
  // Partial overlap: both pieces are resolvable at double precision here.
  Rational lo = max(a.approx_lo(), b.approx_lo());
  Rational hi = min(a.approx_hi(), b.approx_hi());
  if (!(lo < hi)) return std::nullopt;
  return Interval::from_endpoints(lo, hi, a.open() || b.open());
}

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(), center_less);
  for (std::size_t i = 1; i < pieces_.size(); ++i) {
    if (overlaps(pieces_[i - 1], pieces_[i])) {
      std::ostringstream msg;
      msg << "IntervalUnion: pieces " << i - 1 << " and " << i << " overlap (centers "
          << pieces_[i - 1].center().str() << ", " << pieces_[i].center().str() << ")";
      throw DisjointnessViolation(msg.str());
    }
  }
}

std::optional<LogLength> IntervalUnion::total_length() const {
  if (pieces_.empty()) return std::nullopt;
  double mx = -INFINITY;
  for (const auto& p : pieces_) mx = std::max(mx, p.length().log());
  double acc = 0.0;
  for (const auto& p : pieces_) acc += std::exp(p.length().log() - mx);
  return LogLength::from_log(mx + std::log(acc));
}

bool IntervalUnion::all_exact() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Interval& p) { return p.has_exact_endpoints(); });
}

Rational IntervalUnion::exact_total_length() const {
  Rational total(0);
  for (const auto& p : pieces_) {
    if (!p.exact_half_length()) {
      throw RepresentationError("exact_total_length: piece without exact endpoints");
    }
    total += *p.exact_half_length() * Rational(2);
  }
  return total;
}

IntervalUnion merge_disjoint(const std::vector<const IntervalUnion*>& parts) {
  std::vector<Interval> all;
  std::size_t n = 0;
  for (const auto* u : parts) n += u->size();
  all.reserve(n);
  for (const auto* u : parts) all.insert(all.end(), u->pieces().begin(), u->pieces().end());
  return IntervalUnion(std::move(all));
}

// ---------------------------------------------------------------------------
// Schedules and levels

RadiusSchedule RadiusSchedule::power_exp(double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("PowerExp: alpha must be positive");
  RadiusSchedule s;
  s.kind_ = Kind::PowerExp;
  s.param_ = alpha;
  return s;
}

RadiusSchedule RadiusSchedule::subexp_root(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("SubexpRoot: beta must be in (0,1)");
  RadiusSchedule s;
  s.kind_ = Kind::SubexpRoot;
  s.param_ = beta;
  return s;
}

RadiusSchedule RadiusSchedule::geometric_dyadic() {
  RadiusSchedule s;
  s.kind_ = Kind::GeometricDyadic;
  s.param_ = 0.0;
  return s;
}

RadiusSchedule RadiusSchedule::custom(std::map<long, double> log_radii) {
  for (const auto& [n, lr] : log_radii) {
    if (n < 1 || !std::isfinite(lr)) throw InvalidArgument("Custom schedule: bad entry");
  }
  RadiusSchedule s;
  s.kind_ = Kind::Custom;
  s.table_ = std::move(log_radii);
  return s;
}

RadiusSchedule RadiusSchedule::parse(const std::string& text) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  auto param = [&]() {
    if (colon == std::string::npos) throw ConfigError("schedule '" + text + "' needs a parameter");
    try {
      return std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("schedule '" + text + "': bad parameter");
    }
  };
  if (head == "powerexp") return power_exp(param());
  if (head == "subexp") return subexp_root(param());
  if (head == "dyadic") return geometric_dyadic();
  throw ConfigError("unknown schedule '" + text + "' (powerexp:A, subexp:B, dyadic)");
}

std::string RadiusSchedule::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::PowerExp: os << "powerexp:" << param_; break;
    case Kind::SubexpRoot: os << "subexp:" << param_; break;
    case Kind::GeometricDyadic: os << "dyadic"; break;
    case Kind::Custom: os << "custom[" << table_.size() << "]"; break;
  }
  return os.str();
}

LogLength RadiusSchedule::radius(long n) const {
  if (n < 1) throw InvalidArgument("RadiusSchedule: n must be positive");
  switch (kind_) {
    case Kind::PowerExp:
    case Kind::SubexpRoot:
      return LogLength::from_log(-std::pow(static_cast<double>(n), param_));
    case Kind::GeometricDyadic:
      return LogLength::from_log(-static_cast<double>(n) * M_LN2);
    case Kind::Custom: {
      auto it = table_.find(n);
      if (it == table_.end()) {
        throw LookupError("custom schedule has no entry for n = " + std::to_string(n));
      }
      return LogLength::from_log(it->second);
    }
  }
  throw InvalidArgument("RadiusSchedule: unknown kind");
}

std::optional<Rational> RadiusSchedule::exact_radius(long n) const {
  if (kind_ == Kind::GeometricDyadic) return Rational::pow2(-n);
  return std::nullopt;
}

bool RadiusSchedule::admissible(long n) const {
  return radius(n).log() < -std::log(static_cast<double>(n));
}

IntervalUnion make_uniform_level(long n, LogLength length) {
  if (n < 1) throw InvalidArgument("make_uniform_level: n must be positive");
  if (!(length.log() < -std::log(static_cast<double>(n)))) {
    throw DisjointnessViolation("make_uniform_level: n * length >= 1 for n = " +
                                std::to_string(n) + " (pieces would overlap)");
  }
  std::vector<Interval> pieces;
  pieces.reserve(static_cast<std::size_t>(n));
  const LogLength half = length.half();
  for (long i = 0; i < n; ++i) {
    pieces.push_back(Interval::centered(Rational(2 * i + 1, 2 * n), half));
  }
  return IntervalUnion(std::move(pieces));
}

IntervalUnion make_uniform_level(long n, const Rational& length) {
  if (n < 1) throw InvalidArgument("make_uniform_level: n must be positive");
  if (length.sign() <= 0) throw InvalidArgument("make_uniform_level: length must be positive");
  if (!(length * Rational(n) < Rational(1))) {
    throw DisjointnessViolation("make_uniform_level: n * length >= 1 for n = " +
                                std::to_string(n) + " (pieces would overlap)");
  }
  std::vector<Interval> pieces;
  pieces.reserve(static_cast<std::size_t>(n));
  const Rational half = length / Rational(2);
  for (long i = 0; i < n; ++i) {
    pieces.push_back(Interval::centered_exact(Rational(2 * i + 1, 2 * n), half));
  }
  return IntervalUnion(std::move(pieces));
}

IntervalUnion make_level(const RadiusSchedule& s, long n) {
  if (auto exact = s.exact_radius(n)) return make_uniform_level(n, *exact);
  return make_uniform_level(n, s.radius(n));
}

// ---------------------------------------------------------------------------
// Set algebra

IntervalUnion set_difference_closed(const IntervalUnion& a, const IntervalUnion& b) {
  std::vector<Range> cuts;
  cuts.reserve(b.size());
  for (const auto& q : b.pieces()) cuts.push_back({q.approx_lo(), q.approx_hi()});

  std::vector<Interval> out;
  for (const auto& p : a.pieces()) {
    Range whole{p.approx_lo(), p.approx_hi()};
    // First cut whose right end lies beyond the piece's left end.
    auto it = std::lower_bound(cuts.begin(), cuts.end(), whole.lo,
                               [](const Range& c, const Rational& x) { return !(x < c.hi); });
    std::vector<Range> segments{whole};
    bool touched = false;
    for (; it != cuts.end() && it->lo < whole.hi; ++it) {
      segments = subtract(segments, *it);
      touched = true;
    }
    if (!touched) {
      out.push_back(p);
      continue;
    }
    for (const auto& s : segments) out.push_back(Interval::from_endpoints(s.lo, s.hi, true));
  }
  return IntervalUnion(std::move(out));
}

std::vector<IntervalUnion> disjointify(const std::vector<Interval>& intervals) {
  std::vector<IntervalUnion> result;
  result.reserve(intervals.size());
  std::vector<Range> covered;
  for (const auto& j : intervals) {
    Range r{j.approx_lo(), j.approx_hi()};
    std::vector<Range> segments{r};
    for (const auto& c : covered) {
      if (c.lo < r.hi && r.lo < c.hi) segments = subtract(segments, c);
    }
    std::vector<Interval> pieces;
    if (segments.size() == 1 && segments[0].lo == r.lo && segments[0].hi == r.hi) {
      pieces.push_back(j);
    } else {
      for (const auto& s : segments) pieces.push_back(Interval::from_endpoints(s.lo, s.hi, true));
    }
    result.emplace_back(std::move(pieces));
    insert_merged(covered, r);
  }
  return result;
}

IntervalUnion union_of(const std::vector<Interval>& intervals) {
  std::vector<Range> covered;
  for (const auto& j : intervals) insert_merged(covered, {j.approx_lo(), j.approx_hi()});
  std::vector<Interval> pieces;
  for (const auto& c : covered) pieces.push_back(Interval::from_endpoints(c.lo, c.hi, true));
  return IntervalUnion(std::move(pieces));
}

Rational min_center_gap(long p, long q) {
  if (p < 1 || q < 1) throw InvalidArgument("min_center_gap: levels must be positive");
  if (p == q) throw InvalidArgument("min_center_gap: levels must differ");
  // |(2a+1)/(2p) - (2b+1)/(2q)| = |(2a+1)q - (2b+1)p| / (2pq)
  __int128 best = -1;
  const __int128 P = p;
  const __int128 Q = q;
  for (long a = 0; a < p; ++a) {
    const __int128 t = (2 * static_cast<__int128>(a) + 1) * Q;
    const __int128 k = t / P;
    for (__int128 o = k - 2; o <= k + 2; ++o) {
      if (o < 1 || o > 2 * Q - 1 || o % 2 == 0) continue;
      __int128 diff = t - o * P;
      if (diff < 0) diff = -diff;
      if (best < 0 || diff < best) best = diff;
    }
  }
  return Rational(static_cast<long>(best), 2 * p * q);
}

bool unions_disjoint(const IntervalUnion& a, const IntervalUnion& b) {
  const auto& bp = b.pieces();
  for (const auto& piece : a.pieces()) {
    auto it = std::lower_bound(bp.begin(), bp.end(), piece, center_less);
    if (it != bp.end() && overlaps(piece, *it)) return false;
    if (it != bp.begin() && overlaps(piece, *std::prev(it))) return false;
  }
  return true;
}

std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs(
    const std::vector<Interval>& items) {
  // Sweep in order of left end; doubles only pick candidates, the test is exact.
  constexpr double kSlack = 1e-12;
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> lo(items.size());
  std::vector<double> hi(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    lo[i] = items[i].lo_double();
    hi[i] = items[i].hi_double();
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lo[a] != lo[b] ? lo[a] < lo[b] : a < b;
  });
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::vector<std::size_t> active;
  for (std::size_t k : order) {
    std::erase_if(active, [&](std::size_t j) { return hi[j] < lo[k] - kSlack; });
    for (std::size_t j : active) {
      if (overlaps(items[j], items[k])) out.emplace_back(std::min(j, k), std::max(j, k));
    }
    active.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace logcap
