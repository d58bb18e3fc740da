#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "koop/observable.hpp"

using namespace koop;

namespace {

const CompactSample kGrid = uniform_sample(0.0, 2.0, 21);

Observable lambda_observable(std::function<Complex(const StatePoint&)> f, double bound,
                             std::string label) {
  return {std::move(f), bound, std::move(label)};
}

}  // namespace

TEST_CASE("algebra product: unit law, values and bounds") {
  const Observable f = exp_decay_observable(1.0);
  const Observable one = unit_observable();
  const Observable uf = alg_product(one, f);
  for (const auto& x : kGrid.points) CHECK(uf(x) == f(x));

  const Observable ff = alg_product(f, f);
  CHECK(ff(StatePoint::scalar(0.0)).real() == Catch::Approx(1.0));
  CHECK(ff(StatePoint::scalar(1.0)).real() == Catch::Approx(std::exp(-2.0)).margin(1e-15));

  const Observable two = constant_observable({2.0, 0.0});
  const Observable three = constant_observable({3.0, 0.0});
  CHECK(alg_product(two, three).bound == 6.0);
}

TEST_CASE("modulus: nonnegative, unimodular and constant cases") {
  const Observable f = exp_decay_observable(1.0);
  const Observable mf = modulus(f);
  for (const auto& x : kGrid.points) CHECK(mf(x) == f(x));  // f is real and positive

  const Observable wave = complex_exponential_observable(1.0);
  const Observable mw = modulus(wave);
  for (const auto& x : kGrid.points) {
    CHECK(mw(x).real() == Catch::Approx(1.0).margin(1e-15));
    CHECK(mw(x).imag() == 0.0);
  }

  const Observable neg = constant_observable({-2.0, 0.0});
  CHECK(modulus(neg)(StatePoint::scalar(0.3)).real() == 2.0);
  CHECK(modulus(neg).bound == 2.0);
}

TEST_CASE("seminorm over a compact sample is the finite max") {
  CHECK(seminorm_K(unit_observable(), kGrid) == 1.0);

  CompactSample K;
  K.points = {StatePoint::scalar(0.0), StatePoint::scalar(1.0), StatePoint::scalar(2.0)};
  CHECK(seminorm_K(exp_decay_observable(1.0), K) == Catch::Approx(1.0));

  CompactSample K2;
  K2.points = {StatePoint::scalar(0.5), StatePoint::scalar(0.25)};
  CHECK(seminorm_K(coordinate_observable(0, 0.0, 10.0), K2) == 0.5);

  CHECK_THROWS_AS(seminorm_K(unit_observable(), CompactSample{}), std::invalid_argument);
}

TEST_CASE("strict seminorm against a vanishing weight") {
  VanishingWeight zero{[](const StatePoint&) { return 0.0; }, {}, "0"};
  CHECK(strict_seminorm(unit_observable(), zero, kGrid) == 0.0);

  VanishingWeight expw{[](const StatePoint& x) { return std::exp(-x[0]); }, {}, "exp"};
  CompactSample two;
  two.points = {StatePoint::scalar(0.0), StatePoint::scalar(1.0)};
  CHECK(strict_seminorm(unit_observable(), expw, two) == Catch::Approx(1.0));

  VanishingWeight cauchy{[](const StatePoint& x) { return 1.0 / (1.0 + x[0] * x[0]); }, {}, "cauchy"};
  const Observable coord = coordinate_observable(0, 0.0, 10.0);
  // x / (1 + x^2) peaks at exactly x = 1 with value 1/2; the grid hits 1.
  CHECK(strict_seminorm(coord, cauchy, uniform_sample(0.0, 10.0, 1001)) == Catch::Approx(0.5));

  CHECK_THROWS_AS(strict_seminorm(unit_observable(), expw, CompactSample{}), std::invalid_argument);

  // Sampled bound: p_g(f) <= bound(f) * max g on the grid.
  double gmax = 0.0;
  for (const auto& x : kGrid.points) gmax = std::max(gmax, expw(x));
  CHECK(strict_seminorm(exp_decay_observable(2.0), expw, kGrid) <=
        exp_decay_observable(2.0).bound * gmax + 1e-15);
}

TEST_CASE("decay witnesses of a vanishing weight are spot-checked") {
  VanishingWeight expw{[](const StatePoint& x) { return std::exp(-x[0]); }, {}, "exp"};
  expw.decay_witnesses.push_back({0.1, uniform_sample(0.0, std::log(10.0), 64)});
  std::vector<StatePoint> probes;
  for (double x = 2.4; x < 8.0; x += 0.4) probes.push_back(StatePoint::scalar(x));
  CHECK(check_decay_witness(expw, probes).pass);

  VanishingWeight bad{[](const StatePoint&) { return 0.5; }, {}, "const-half"};
  bad.decay_witnesses.push_back({0.1, uniform_sample(0.0, 1.0, 8)});
  CHECK_FALSE(check_decay_witness(bad, probes).pass);
}

TEST_CASE("dual pairing with atomic measures") {
  const Observable f = exp_decay_observable(1.0);
  const AtomicMeasure d0 = dirac(StatePoint::scalar(0.7));
  CHECK(pair(f, d0) == f(StatePoint::scalar(0.7)));

  AtomicMeasure mu;
  mu.atoms = {{StatePoint::scalar(0.0), {1.0, 0.0}}, {StatePoint::scalar(1.0), {-1.0, 0.0}}};
  CHECK(pair(f, mu).real() == Catch::Approx(1.0 - std::exp(-1.0)).margin(1e-15));
  CHECK(pair(f, mu).real() == Catch::Approx(0.632121).margin(1e-6));
  CHECK(mu.total_variation() == 2.0);

  CHECK(pair(f, AtomicMeasure{}) == Complex{0.0, 0.0});
}

TEST_CASE("pairing is bilinear") {
  const Observable f = exp_decay_observable(1.0);
  const Observable g = sin_observable();
  AtomicMeasure mu;
  mu.atoms = {{StatePoint::scalar(0.2), {0.5, 1.0}}, {StatePoint::scalar(1.3), {-2.0, 0.25}}};
  const Complex a{1.5, -0.5};
  CHECK(std::abs(pair(add(scale(a, f), g), mu) - (a * pair(f, mu) + pair(g, mu))) < 1e-13);

  AtomicMeasure doubled = mu;
  for (auto& atom : doubled.atoms) atom.weight *= 2.0;
  CHECK(std::abs(pair(f, doubled) - 2.0 * pair(f, mu)) < 1e-13);
}

TEST_CASE("algebra laws hold to machine precision on grids") {
  const Observable f = exp_decay_observable(1.0);
  const Observable g = sin_observable();
  const Observable h = complex_exponential_observable(2.0);
  for (const auto& x : kGrid.points) {
    CHECK(alg_product(f, g)(x) == alg_product(g, f)(x));  // commutativity is exact
    CHECK(std::abs(alg_product(alg_product(f, g), h)(x) - alg_product(f, alg_product(g, h))(x)) <
          1e-15);
    CHECK(std::abs(modulus(alg_product(f, h))(x) - alg_product(modulus(f), modulus(h))(x)) < 1e-14);
  }
}

TEST_CASE("seminorm is absolutely homogeneous and subadditive on samples") {
  const Observable f = exp_decay_observable(1.0);
  const Observable g = sin_observable();
  const Complex c{-2.0, 1.0};
  CHECK(seminorm_K(scale(c, f), kGrid) ==
        Catch::Approx(std::abs(c) * seminorm_K(f, kGrid)).epsilon(1e-12));
  CHECK(seminorm_K(add(f, g), kGrid) <= seminorm_K(f, kGrid) + seminorm_K(g, kGrid) + 1e-12);
}

TEST_CASE("claimed bounds are spot-checked") {
  CHECK(check_bound(exp_decay_observable(1.0), kGrid).pass);
  const Observable lying = lambda_observable(
      [](const StatePoint& x) { return Complex{std::cos(x[0]), 0.0}; }, 0.5, "cos-claiming-half");
  CHECK_FALSE(check_bound(lying, kGrid).pass);
}

TEST_CASE("dictionary closure contains the unit, products and moduli") {
  const Dictionary dict =
      make_dictionary({exp_decay_observable(1.0), complex_exponential_observable(1.0)}, 1, true);
  CHECK(dict.members.front().label == "1");
  bool has_product = false;
  bool has_modulus = false;
  for (const auto& m : dict.members) {
    if (m.label.find('*') != std::string::npos) has_product = true;
    if (m.label.front() == '|') has_modulus = true;
  }
  CHECK(has_product);
  CHECK(has_modulus);
}

TEST_CASE("mixed convergence: exp(-x/n) converges to the unit on compacts") {
  std::vector<Observable> seq;
  std::vector<double> schedule;
  const double c = 5.0;
  for (int n = 1; n <= 24; ++n) {
    seq.push_back(exp_decay_observable(1.0 / n));
    schedule.push_back(c / n);
  }
  const std::vector<CompactSample> Ks = {uniform_sample(0.0, 1.0, 11), uniform_sample(0.0, c, 26)};
  const auto rep = mixed_convergence_check(seq, unit_observable(), Ks, 1.0, schedule);
  CHECK(rep.bound_ok);
  for (const auto& pk : rep.per_compact) CHECK(pk.converged);
  CHECK(rep.pass);
}

TEST_CASE("mixed convergence flags unbounded sequences") {
  std::vector<Observable> seq;
  std::vector<double> schedule;
  for (int n = 1; n <= 5; ++n) {
    seq.push_back(constant_observable({static_cast<double>(n), 0.0}));
    schedule.push_back(1.0);
  }
  const auto rep =
      mixed_convergence_check(seq, unit_observable(), {uniform_sample(0.0, 1.0, 5)}, 1.0, schedule);
  CHECK_FALSE(rep.bound_ok);
  CHECK_FALSE(rep.pass);
  CHECK(rep.bound_violations.size() == 4);  // all but n = 1
}

TEST_CASE("mixed convergence: constant sequences pass with zero residuals") {
  const Observable f = exp_decay_observable(1.0);
  std::vector<Observable> seq(6, f);
  std::vector<double> schedule(6, 1e-15);
  const auto rep = mixed_convergence_check(seq, f, {kGrid}, 1.0, schedule);
  CHECK(rep.pass);
  for (const auto& pk : rep.per_compact) {
    for (double r : pk.residuals) CHECK(r == 0.0);
  }
}

TEST_CASE("mixed convergence rejects mismatched schedules") {
  std::vector<Observable> seq(3, unit_observable());
  CHECK_THROWS_AS(
      mixed_convergence_check(seq, unit_observable(), {kGrid}, 1.0, std::vector<double>(2, 1.0)),
      std::invalid_argument);
}

TEST_CASE("algebra and lattice laws hold at randomized samples") {
  std::mt19937 rng(20240813);
  std::uniform_real_distribution<double> coord(0.0, 2.0);
  std::uniform_real_distribution<double> scalar(-2.0, 2.0);
  const std::vector<Observable> pool = {
      exp_decay_observable(0.7), sin_observable(), complex_exponential_observable(1.3),
      gaussian_observable(2.0, StatePoint::scalar(1.0)), constant_observable({0.4, -1.1})};
  for (int trial = 0; trial < 50; ++trial) {
    const Observable& f = pool[rng() % pool.size()];
    const Observable& g = pool[rng() % pool.size()];
    const Observable& h = pool[rng() % pool.size()];
    const StatePoint x = StatePoint::scalar(coord(rng));
    CHECK(alg_product(f, g)(x) == alg_product(g, f)(x));
    CHECK(std::abs(alg_product(alg_product(f, g), h)(x) - alg_product(f, alg_product(g, h))(x)) <
          1e-14);
    CHECK(std::abs(modulus(alg_product(f, g))(x) - alg_product(modulus(f), modulus(g))(x)) <
          1e-14);
    CHECK(std::abs(alg_product(unit_observable(), f)(x) - f(x)) == 0.0);
    // Claimed bounds survive the algebra.
    CHECK(std::abs(alg_product(f, g)(x)) <= alg_product(f, g).bound * (1.0 + 1e-12));

    const Complex c{scalar(rng), scalar(rng)};
    CHECK(seminorm_K(scale(c, f), kGrid) ==
          Catch::Approx(std::abs(c) * seminorm_K(f, kGrid)).margin(1e-12));
    CHECK(seminorm_K(add(f, g), kGrid) <= seminorm_K(f, kGrid) + seminorm_K(g, kGrid) + 1e-12);
  }
}
