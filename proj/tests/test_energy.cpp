#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "logcap/energy.hpp"
#include "logcap/errors.hpp"
#include "logcap/quadrature_oracle.hpp"
#include "oracles.hpp"

using namespace logcap;

namespace {

Interval iv(long a, long b, long den) {
  return Interval::from_endpoints(Rational(a, den), Rational(b, den));
}

Interval ivd(double lo, double hi) {
  return Interval::from_endpoints(Rational::from_double(lo), Rational::from_double(hi));
}

// Random step probability measure with `pieces` pieces of length >= min_len.
StepMeasure random_measure(std::mt19937_64& rng, int pieces, long grid = 100000) {
  std::uniform_int_distribution<long> pos(0, grid);
  std::vector<long> cuts;
  while (static_cast<int>(cuts.size()) < 2 * pieces) cuts.push_back(pos(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Interval> ps;
  std::vector<double> ws;
  std::uniform_real_distribution<double> w(0.05, 1.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); i += 2) {
    ps.push_back(iv(cuts[i], cuts[i + 1], grid));
    ws.push_back(w(rng));
  }
  return StepMeasure(IntervalUnion(ps), ws);
}

// Random disjoint pair of intervals with lengths >= min_len.
std::pair<Interval, Interval> random_pair(std::mt19937_64& rng, double min_len) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    double x[4] = {u(rng), u(rng), u(rng), u(rng)};
    std::sort(x, x + 4);
    if (x[1] - x[0] < min_len || x[3] - x[2] < min_len || x[2] - x[1] <= 0.0) continue;
    return {ivd(x[0], x[1]), ivd(x[2], x[3])};
  }
}

double sandwich_delta(const Interval& a, const Interval& b) {
  const double d = std::fabs(a.center_double() - b.center_double());
  const double rho = (a.length().value() + b.length().value()) / (2.0 * d);
  return std::min(2.0, -std::log1p(-rho));
}

}  // namespace

TEST_CASE("kernel antiderivative") {
  CHECK(kernel_antiderivative(0.0) == 0.0);
  CHECK(kernel_antiderivative(1.0) == doctest::Approx(-0.75));
  CHECK(kernel_antiderivative(-0.5) == kernel_antiderivative(0.5));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> e(-6.0, 0.0);
  for (int i = 0; i < 100; ++i) {
    const double t = std::pow(10.0, e(rng));
    const double h = t * 1e-3;
    const double second = (kernel_antiderivative(t + h) - 2.0 * kernel_antiderivative(t) +
                           kernel_antiderivative(t - h)) /
                          (h * h);
    CHECK(std::fabs(second - std::log(t)) <= 1e-5 * std::fabs(std::log(t)));
  }
}

TEST_CASE("uniform_pair_energy against the long double formula") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const double a0 = u(rng) * 0.5, a1 = a0 + 1e-3 + u(rng) * 0.4;
    const double b0 = u(rng) * 0.5, b1 = b0 + 1e-3 + u(rng) * 0.4;
    const double d = 0.5 * (b0 + b1) - 0.5 * (a0 + a1);
    const double ref = static_cast<double>(oracle::rect_energy(a0, a1, b0, b1));
    CHECK(uniform_pair_energy(std::fabs(d), a1 - a0, b1 - b0) ==
          doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("mutual_energy_const examples") {
  const auto j = iv(2, 3, 10);
  const auto k = iv(7, 8, 10);
  const auto ex = mutual_energy_const(j, k, EvalPolicy::exact());
  CHECK(ex.value > std::log(2.0));
  CHECK(ex.value < std::log(2.0) - std::log(0.8));
  CHECK(ex.value == doctest::Approx(quadrature_oracle_pair(0.2, 0.3, 0.7, 0.8)).epsilon(1e-8));
  CHECK(ex.certified_error == 0.0);

  const auto pc = mutual_energy_const(j, k, EvalPolicy::point_charge());
  CHECK(pc.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(pc.certified_error == doctest::Approx(-std::log(0.8)).epsilon(1e-14));
  CHECK(std::fabs(ex.value - pc.value) <= pc.certified_error);

  const auto a = Interval::centered(Rational(1, 4), LogLength::from_log(-1000.0).half());
  const auto b = Interval::centered(Rational(3, 4), LogLength::from_log(-1000.0).half());
  const auto far = mutual_energy_const(a, b, EvalPolicy::point_charge());
  CHECK(far.value == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(far.certified_error < 1e-300);
  const auto autov = mutual_energy_const(a, b, EvalPolicy::automatic());
  CHECK(autov.value == far.value);
}

TEST_CASE("policies") {
  const auto j = iv(2, 5, 10);
  const auto k = iv(4, 8, 10);
  CHECK_THROWS_AS(mutual_energy_const(j, k, EvalPolicy::point_charge()), PolicyError);
  // Touching pieces: rho = 1.
  CHECK_THROWS_AS(mutual_energy_const(iv(1, 2, 8), iv(2, 3, 8), EvalPolicy::point_charge()),
                  GeometryError);
  CHECK_THROWS_AS(mutual_energy_const(iv(2, 4, 10), iv(4, 6, 10), EvalPolicy::point_charge()),
                  GeometryError);
  const auto tiny = Interval::centered(Rational(1, 2), LogLength::from_log(-40.0));
  CHECK_THROWS_AS(mutual_energy_const(tiny, iv(1, 2, 10), EvalPolicy::exact()), PrecisionError);
  CHECK_NOTHROW(mutual_energy_const(tiny, iv(1, 2, 10), EvalPolicy::automatic()));
  CHECK(EvalPolicy::parse("auto:1e-6").rho_threshold == 1e-6);
  CHECK(EvalPolicy::parse("exact").mode == EvalMode::Exact);
  CHECK(EvalPolicy::parse("point").mode == EvalMode::PointCharge);
  CHECK(EvalPolicy::parse(EvalPolicy::automatic(1e-5).tag()).rho_threshold == 1e-5);
  CHECK_THROWS(EvalPolicy::parse("fast"));
}

TEST_CASE("self_energy_const") {
  CHECK(self_energy_const(LogLength::from_log(0.0)) == 1.5);
  CHECK(self_energy_const(LogLength::from_log(-1000.0)) == 1001.5);
  CHECK(self_energy_const(LogLength::from_length(0.5)) ==
        doctest::Approx(std::log(2.0) + 1.5).epsilon(1e-15));
  CHECK(self_energy_const(LogLength::from_length(0.5)) ==
        doctest::Approx(quadrature_oracle_pair(0.0, 0.5, 0.0, 0.5)).epsilon(1e-8));
  for (double lr : {-1e-3, -1.0, -30.0, -700.0, -1e5}) {
    // One rounding in -log r + 3/2.
    const double diff =
        self_energy_const(LogLength::from_log(lr)) - self_energy_const(LogLength::from_log(0.0));
    CHECK(std::fabs(diff + lr) <= 0x1p-52 * (std::fabs(lr) + 1.5));
  }
  for (double r : {1e-3, 1e-6}) {
    CHECK(self_energy_const(LogLength::from_length(r)) ==
          doctest::Approx(quadrature_oracle_pair(0.5 - r / 2, 0.5 + r / 2, 0.5 - r / 2, 0.5 + r / 2))
              .epsilon(1e-7));
  }
}

TEST_CASE("energy examples") {
  const auto leb = StepMeasure::lebesgue();
  const auto e = energy(leb);
  CHECK(std::fabs(e.total() - 1.5) <= 1e-12);
  CHECK(e.cross_part == 0.0);
  CHECK(quadrature_oracle(leb, leb) == doctest::Approx(1.5).epsilon(1e-8));

  const auto mu = redistribute(leb, make_uniform_level(2, Rational(1, 10)));
  const auto e2 = energy(mu, EvalPolicy::exact());
  CHECK(e2.self_part == doctest::Approx(0.5 * (-std::log(0.1) + 1.5)).epsilon(1e-14));
  CHECK(e2.total() == doctest::Approx(quadrature_oracle(mu, mu)).epsilon(1e-8));
  // Frozen value from the long double oracle.
  const double cross = 0.5 * static_cast<double>(oracle::rect_energy(0.2L, 0.3L, 0.7L, 0.8L));
  CHECK(e2.cross_part == doctest::Approx(cross).epsilon(1e-12));
}

TEST_CASE("point charges stay within the certified error") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 1000; ++t) {
    // Short pieces on a coarse grid, so pieces are well separated.
    std::vector<Interval> ps;
    std::vector<double> ws;
    const int n = 2 + static_cast<int>(rng() % 5);
    std::vector<long> slots(20);
    std::iota(slots.begin(), slots.end(), 0);
    std::shuffle(slots.begin(), slots.end(), rng);
    std::sort(slots.begin(), slots.begin() + n);
    for (int i = 0; i < n; ++i) {
      ps.push_back(iv(slots[i] * 1000 + 400, slots[i] * 1000 + 400 + 1 + static_cast<long>(rng() % 50), 20000));
      ws.push_back(0.1 + static_cast<double>(rng() % 100) / 100.0);
    }
    const StepMeasure mu(IntervalUnion(ps), ws);
    const auto ex = energy(mu, EvalPolicy::exact());
    const auto pc = energy(mu, EvalPolicy::point_charge());
    CHECK(std::fabs(ex.total() - pc.total()) <= pc.certified_error * (1 + 1e-12) + 1e-14);
    CHECK(pc.certified_error > 0.0);
    CHECK(ex.self_part == pc.self_part);
  }
}

TEST_CASE("mutual energy properties") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    const auto mu = random_measure(rng, 1 + static_cast<int>(rng() % 6));
    const auto nu = random_measure(rng, 1 + static_cast<int>(rng() % 6));
    const auto nu2 = random_measure(rng, 1 + static_cast<int>(rng() % 6));
    // (1) I(mu, mu) = I(mu).
    CHECK(mutual_energy(mu, mu, EvalPolicy::exact()).value ==
          doctest::Approx(energy(mu, EvalPolicy::exact()).total()).epsilon(1e-12));
    // (2) bit-exact symmetry.
    CHECK(mutual_energy(mu, nu, EvalPolicy::exact()).value ==
          mutual_energy(nu, mu, EvalPolicy::exact()).value);
    // (3) positivity.
    CHECK(mutual_energy(mu, nu, EvalPolicy::exact()).value > 0.0);
    CHECK(energy(mu, EvalPolicy::exact()).total() > 0.0);
    // (4) linearity in the second argument.
    const double a = 0.3, b = 1.7;
    const auto mix = combine({{a, &nu}, {b, &nu2}});
    const double lhs = mutual_energy(mu, mix, EvalPolicy::exact()).value;
    const double rhs = a * mutual_energy(mu, nu, EvalPolicy::exact()).value +
                       b * mutual_energy(mu, nu2, EvalPolicy::exact()).value;
    CHECK(std::fabs(lhs - rhs) <= 1e-10);
    // Scaling of one argument.
    CHECK(mutual_energy(mu, nu.scaled(2.5), EvalPolicy::exact()).value ==
          doctest::Approx(2.5 * mutual_energy(mu, nu, EvalPolicy::exact()).value).epsilon(1e-13));
  }
}

TEST_CASE("energy of a prime-window average expands bilinearly") {
  const auto leb = StepMeasure::lebesgue();
  const auto s = RadiusSchedule::power_exp(1.5);
  const auto w = primes_in_window(10);
  std::vector<StepMeasure> levels;
  for (long n : w.primes) levels.push_back(redistribute(leb, make_level(s, n)));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> p(levels.size());
    double sum = 0.0;
    for (auto& x : p) sum += (x = u(rng));
    for (auto& x : p) x /= sum;
    double expansion = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = 0; j < levels.size(); ++j) {
        const double iij = i == j ? energy(levels[i]).total()
                                  : mutual_energy(levels[i], levels[j]).value;
        expansion += p[i] * p[j] * iij;
      }
    }
    std::vector<std::pair<double, const StepMeasure*>> terms;
    for (std::size_t i = 0; i < levels.size(); ++i) terms.emplace_back(p[i], &levels[i]);
    CHECK(std::fabs(energy_of_sum(terms).total() - expansion) <= 1e-10);
    // Same through the refined convex combination.
    const auto mix = combine(terms);
    CHECK(std::fabs(energy(mix).total() - expansion) <= 1e-10 * std::fabs(expansion));
  }
}

TEST_CASE("uniform level fast path") {
  const auto leb = StepMeasure::lebesgue();
  {
    const LogLength r = LogLength::from_length(0.01);
    const auto fast = uniform_level_energy_fast(3, r, EvalPolicy::exact());
    const auto slow = energy(redistribute(leb, make_uniform_level(3, r)), EvalPolicy::exact());
    CHECK(std::fabs(fast.total() - slow.total()) <= 1e-12);
  }
  {
    const LogLength r = LogLength::from_log(-7.0);
    CHECK(uniform_level_energy_fast(1, r).total() == 8.5);
    CHECK(uniform_level_energy_fast(1, r).cross_part == 0.0);
  }
  for (long n : {2L, 10L, 57L, 300L, 1000L, 2000L}) {
    const LogLength r = RadiusSchedule::subexp_root(0.5).radius(n);
    const auto fast = uniform_level_energy_fast(n, r);
    const auto slow = energy(redistribute(leb, make_uniform_level(n, r)));
    CHECK(std::fabs(fast.total() - slow.total()) <= 1e-10);
    CHECK(std::fabs(fast.self_part - slow.self_part) <= 1e-12);
  }
  // Runs deterministically.
  const LogLength r5 = RadiusSchedule::subexp_root(0.5).radius(100000);
  CHECK(uniform_level_energy_fast(100000, r5).total() ==
        uniform_level_energy_fast(100000, r5).total());
  CHECK_THROWS_AS(uniform_level_energy_fast(10, LogLength::from_log(std::log(0.2))),
                  DisjointnessViolation);
}

TEST_CASE("truncated energy") {
  const auto leb = StepMeasure::lebesgue();
  CHECK(std::fabs(truncated_energy(leb, 40.0) - 1.5) <= 1e-12);
  CHECK(truncated_energy(leb, 1e-9) < 1e-8);
  CHECK(truncated_energy(leb, 1e-9) >= 0.0);
  // Lebesgue: integral of min(-log t, C) 2(1 - t) dt over [0, 1].
  const double c = 2.0, e = std::exp(-c);
  const double direct = c * (2 * e - e * e) +
                        (1.5 - (e * e * std::log(e) - 2 * e * std::log(e) + 2 * e - 0.5 * e * e));
  CHECK(truncated_energy(leb, c) == doctest::Approx(direct).epsilon(1e-12));

  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto mu = random_measure(rng, 1 + static_cast<int>(rng() % 6));
    const double total = energy(mu).total();
    double prev = -INFINITY;
    for (double cc = 1.0; cc <= 64.0; cc *= 2.0) {
      const double v = truncated_energy(mu, cc);
      CHECK(v >= prev);
      CHECK(v <= total + 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("sandwich bounds on random disjoint pairs") {
  std::mt19937_64 rng(9);
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto [a, b] = random_pair(rng, 1e-6);
    const double v = mutual_energy_const(a, b, EvalPolicy::exact()).value;
    const double base = -std::log(std::fabs(a.center_double() - b.center_double()));
    if (!(base < v && v < base + sandwich_delta(a, b))) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("quadrature oracle agreement") {
  CHECK(quadrature_oracle_pair(0.0, 1.0, 0.0, 1.0) == doctest::Approx(1.5).epsilon(1e-8));
  const double v = quadrature_oracle_pair(0.2, 0.3, 0.7, 0.8);
  CHECK(v > std::log(2.0));
  CHECK(v < std::log(2.0) - std::log(0.8));
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    const auto [a, b] = random_pair(rng, 1e-3);
    const double cf = mutual_energy_const(a, b, EvalPolicy::exact()).value;
    const double q = quadrature_oracle_pair(a.lo_double(), a.hi_double(), b.lo_double(), b.hi_double());
    CHECK(std::fabs(cf - q) <= 1e-7);
  }
  const auto tiny = StepMeasure::uniform_on(IntervalUnion({iv(0, 1, 10000000)}));
  CHECK_THROWS_AS(quadrature_oracle(tiny, tiny), InvalidArgument);
}
