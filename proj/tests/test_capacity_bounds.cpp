#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "logcap/capacity_bounds.hpp"
#include "logcap/energy.hpp"
#include "logcap/errors.hpp"
#include "logcap/measures.hpp"

using namespace logcap;

namespace {

CoverDescription lengths_only(const std::vector<double>& logs) {
  CoverDescription c;
  for (double l : logs) c.lengths.push_back(LogLength::from_log(l));
  return c;
}

// Ten disjoint intervals on a grid of 10^5, each at most 0.05 long.
IntervalUnion random_cover(std::mt19937_64& rng) {
  const long grid = 100000;
  std::vector<Interval> ps;
  std::uniform_int_distribution<long> len(100, 5000);
  long at = 0;
  for (int k = 0; k < 10; ++k) {
    const long l = len(rng);
    std::uniform_int_distribution<long> skip(0, 4000);
    at += skip(rng);
    ps.push_back(Interval::from_endpoints(Rational(at, grid), Rational(at + l, grid)));
    at += l;
  }
  return IntervalUnion(ps);
}

// Step probability measure carried by random subintervals of the cover.
StepMeasure random_measure_inside(std::mt19937_64& rng, const IntervalUnion& cover) {
  std::vector<Interval> ps;
  std::vector<double> ws;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& p : cover.pieces()) {
    if (u(rng) < 0.3 && !ps.empty()) continue;
    const Rational lo = p.lo();
    const Rational len = p.hi() - p.lo();
    const long a = static_cast<long>(u(rng) * 400);
    const long b = a + 1 + static_cast<long>(u(rng) * (999 - a));
    ps.push_back(Interval::from_endpoints(lo + len * Rational(a, 1000), lo + len * Rational(b, 1000)));
    ws.push_back(0.01 + u(rng));
  }
  return StepMeasure(IntervalUnion(ps), ws);
}

}  // namespace

TEST_CASE("cs lower bound examples") {
  CHECK(cs_lower_energy_bound(lengths_only({-2.0, -2.0})) == doctest::Approx(1.0).epsilon(1e-15));
  for (double lr : {-0.5, -3.0, -40.0, -1e6}) {
    CHECK(cs_lower_energy_bound(lengths_only({lr})) == doctest::Approx(-lr).epsilon(1e-15));
    // Self energy of one piece sits above it.
    CHECK(self_energy_const(LogLength::from_log(lr)) > -lr);
  }
  CHECK_THROWS_AS(cs_lower_energy_bound(CoverDescription{}), InvalidArgument);
  CHECK_THROWS_AS(cs_lower_energy_bound(lengths_only({0.1})), InvalidArgument);
}

TEST_CASE("cs lower bound holds on random covers") {
  std::mt19937_64 rng(4101);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const IntervalUnion cover = random_cover(rng);
    const double bound = cs_lower_energy_bound(CoverDescription::from_union(cover));
    const StepMeasure mu = random_measure_inside(rng, cover);
    const double e = energy(mu, EvalPolicy::exact()).total();
    CHECK(e >= bound);
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("capacity bound from series") {
  const double zeta2 = M_PI * M_PI / 6.0;
  CHECK(capacity_bound_from_series(zeta2) == doctest::Approx(std::exp(-6.0 / (M_PI * M_PI))));
  CHECK(capacity_bound_from_series(zeta2) == doctest::Approx(0.5446).epsilon(1e-4));
  CHECK(capacity_bound_from_series(INFINITY) == 1.0);
  double prev = 1.0;
  for (double s = 1.0; s > 2e-3; s /= 2) {
    const double b = capacity_bound_from_series(s);
    CHECK(b < prev);
    CHECK(b >= 0.0);
    prev = b;
  }
  CHECK(capacity_bound_from_series(1e-4) == 0.0);

  const CoverDescription c = lengths_only({-2.0, -3.0, -5.0});
  const BoundReport r = bound_report(c);
  CHECK(r.capacity_upper_bound == doctest::Approx(std::exp(-r.energy_lower_bound)));
  CHECK(r.energy_lower_bound == doctest::Approx(1.0 / r.series_value));
  CHECK(capacity_upper_bound(c) == doctest::Approx(r.capacity_upper_bound));
}

TEST_CASE("adding an interval never raises the energy bound") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> lr(-50.0, -0.01);
  CoverDescription c;
  double prev = INFINITY;
  for (int k = 0; k < 200; ++k) {
    c.lengths.push_back(LogLength::from_log(lr(rng)));
    const double b = cs_lower_energy_bound(c);
    CHECK(b <= prev);
    prev = b;
  }
}

TEST_CASE("tail series brackets") {
  const TailSeries z = tail_series(3.0, 1, 10000);
  const double zeta2 = M_PI * M_PI / 6.0;
  CHECK(z.converged);
  CHECK(z.lower() <= zeta2);
  CHECK(zeta2 <= z.upper());
  CHECK(z.upper() - z.lower() <= 1e-6);

  const TailSeries t10 = tail_series(3.0, 10, 10000);
  // zeta(2) - sum_{n<10} 1/n^2
  double head = 0.0;
  for (int n = 1; n < 10; ++n) head += 1.0 / (n * n);
  CHECK(t10.lower() <= zeta2 - head + 1e-15);
  CHECK(zeta2 - head - 1e-15 <= t10.upper());
  CHECK(t10.lower() == doctest::Approx(0.10516).epsilon(1e-4));

  const TailSeries h = tail_series(2.0, 1, 1000);
  CHECK_FALSE(h.converged);
  CHECK(std::isinf(h.upper()));
  CHECK(tail_capacity_bound(h).capacity_upper_bound == 1.0);

  CHECK(tail_series(RadiusSchedule::power_exp(3.0), 1, 100).partial_sum ==
        tail_series(3.0, 1, 100).partial_sum);
  CHECK_THROWS_AS(tail_series(RadiusSchedule::subexp_root(0.5), 1, 100), InvalidArgument);

  // Bracket contains the tail for other exponents too (reference: many more terms).
  for (double a : {2.5, 3.0, 4.0}) {
    for (long m : {1L, 7L, 100L}) {
      const TailSeries small = tail_series(a, m, 50);
      const TailSeries big = tail_series(a, m, 2000000);
      CHECK(small.lower() <= big.upper());
      CHECK(big.lower() <= small.upper());
    }
  }
}

TEST_CASE("tail capacity bound for alpha = 3") {
  const BoundReport b1 = tail_capacity_bound(tail_series(3.0, 1, 10000));
  CHECK(std::fabs(b1.capacity_upper_bound - std::exp(-6.0 / (M_PI * M_PI))) <= 1e-4);
  const BoundReport b100 = tail_capacity_bound(tail_series(3.0, 100, 10000));
  CHECK(b100.capacity_upper_bound <= 1e-40);
  CHECK(b100.series_value == doctest::Approx(0.01005).epsilon(1e-3));
}

TEST_CASE("h volume") {
  CHECK(h_volume_upper(lengths_only({-2.0, -2.0}), MeasuringFunction::h0()) ==
        doctest::Approx(1.0).epsilon(1e-15));
  for (long n : {3L, 10L, 50L}) {
    const LogLength r = LogLength::from_length(0.2 / static_cast<double>(n));
    const auto level = make_uniform_level(n, r);
    const double v = h_volume_upper(CoverDescription::from_union(level), MeasuringFunction::identity());
    CHECK(v == doctest::Approx(static_cast<double>(n) * r.value()).epsilon(1e-13));
  }
  MeasuringFunction bad("negative", [](double) { return NAN; });
  CHECK_THROWS_AS(h_volume_upper(lengths_only({-2.0}), bad), InvalidArgument);
}

TEST_CASE("ursell schedule") {
  const auto w = doubly_exponential_witness(5);
  REQUIRE(w.size() == 5);
  for (int j = 1; j <= 5; ++j) CHECK(w[j - 1] == std::pow(4.0, j + 1));

  const UrsellSchedule s = ursell_schedule(MeasuringFunction::loglog(), w, 5);
  REQUIRE(s.rows.size() == 5);
  CHECK(s.accepted_count() == 5);
  for (const auto& row : s.rows) {
    CHECK(row.accepted);
    CHECK(row.verified_wide);
    CHECK(row.log_nh < -row.j * M_LN2);
    CHECK(row.log_n_over_abs_log_r > row.j * M_LN2);
  }
  REQUIRE(s.h_volume_partial_sums.size() == 5);
  for (double v : s.h_volume_partial_sums) CHECK(v < 1.0);

  try {
    ursell_schedule(MeasuringFunction::h0(), w, 5);
    FAIL("h0 accepted");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("j = 1") != std::string::npos);
  }
}

TEST_CASE("phase classification") {
  CHECK(phase_classify(3.0) == Phase::ZeroCapacity);
  CHECK(phase_classify(1.5) == Phase::FullCapacity);
  CHECK(phase_classify(2.0) == Phase::OpenBoundary);
  CHECK(phase_name(Phase::OpenBoundary) != phase_name(Phase::ZeroCapacity));
}

TEST_CASE("bounded h0 volume goes with vanishing capacity bound on alpha = 3") {
  const RadiusSchedule s = RadiusSchedule::power_exp(3.0);
  double prev_cap = 2.0;
  for (long m : {1L, 2L, 4L, 8L, 16L, 32L}) {
    // Tail cover V_m, ..., V_{m+199}; pieces of V_n have length r_n.
    CoverDescription c;
    for (long n = m; n < m + 200; ++n) {
      for (long i = 0; i < n; ++i) c.lengths.push_back(s.radius(n));
    }
    const double vol = h_volume_upper(c, MeasuringFunction::h0());
    CHECK(vol <= M_PI * M_PI / 6.0);
    CHECK(vol == doctest::Approx(1.0 / cs_lower_energy_bound(c)).epsilon(1e-12));
    const double cap = capacity_upper_bound(c);
    CHECK(cap < prev_cap);
    prev_cap = cap;
  }
  CHECK(prev_cap < 1e-10);
}
