#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "koop/characterize.hpp"

using namespace koop;

namespace {

const CompactSample kGrid = uniform_sample(0.0, 2.0, 21);

Observable clipped_affine(double shift, std::string label) {
  // x - shift, clipped to [-1, 3]: linear near the orbit segments under test.
  return {[shift](const StatePoint& x) {
            return Complex{std::min(std::max(x[0] - shift, -1.0), 3.0), 0.0};
          },
          3.0, std::move(label)};
}

Dictionary exp_dict() { return make_dictionary({exp_decay_observable(1.0)}, 1, false); }

}  // namespace

TEST_CASE("hsign follows the exact case split") {
  CHECK(hsign({0.0, 0.0}, {3.0, -4.0}) == Complex{5.0, 0.0});
  CHECK(hsign({2.0, 0.0}, {7.0, 0.0}) == Complex{7.0, 0.0});
  const Complex i{0.0, 1.0};
  CHECK(std::abs(hsign(i, {1.0, 0.0}) - i) < 1e-15);
  // Values inside the eps band take the modulus branch.
  CHECK(hsign({1e-12, 0.0}, {3.0, -4.0}, 1e-9) == Complex{5.0, 0.0});
  const auto rec = hsign_value({0.0, 0.0}, {0.0, -2.0});
  CHECK(rec.result == Complex{2.0, 0.0});
}

TEST_CASE("koopman operators pass the algebra suite to machine precision") {
  const Semiflow flow = make_translation_flow();
  const OperatorUnderTest op = koopman_operator_under_test(flow);
  const Dictionary dict =
      make_dictionary({exp_decay_observable(1.0), sin_observable(), complex_exponential_observable(1.0)}, 1, false);
  const auto rep = check_algebra_homomorphism(op, 1.0, dict, kGrid, 1e-12);
  CHECK(rep.pass);
  CHECK(rep.max_residual() <= 1e-12);
}

TEST_CASE("the averaging operator fails multiplicativity at the documented witness") {
  const Semiflow flow = make_translation_flow();
  const OperatorUnderTest avg = averaging_operator(flow);
  const Observable f = exp_decay_observable(1.0);
  const StatePoint zero = StatePoint::scalar(0.0);

  const double lhs = avg.apply(1.0, alg_product(f, f))(zero).real();
  const double rhs = std::pow(avg.apply(1.0, f)(zero).real(), 2);
  CHECK(lhs == Catch::Approx((1.0 + std::exp(-2.0)) / 2.0).margin(1e-14));
  CHECK(rhs == Catch::Approx(std::pow((1.0 + std::exp(-1.0)) / 2.0, 2)).margin(1e-14));
  CHECK(lhs - rhs == Catch::Approx(0.0999).margin(1e-4));

  const auto rep = check_algebra_homomorphism(avg, 1.0, exp_dict(), kGrid, 0.05);
  CHECK_FALSE(rep.pass);
  CHECK(rep.find("multiplicativity")->residual >= 0.09);
  CHECK(rep.find("unitality")->pass);  // averaging is unital
}

TEST_CASE("a scaled koopman operator fails unitality") {
  const Semiflow flow = make_translation_flow();
  const OperatorUnderTest twice = scaled_operator(flow, {2.0, 0.0});
  const auto rep = check_algebra_homomorphism(twice, 1.0, exp_dict(), kGrid, 0.05);
  CHECK_FALSE(rep.find("unitality")->pass);
  CHECK(rep.find("unitality")->residual == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("lattice suite separates koopman from averaging") {
  const Semiflow flow = make_translation_flow();
  const Dictionary dict = make_dictionary({complex_exponential_observable(1.0)}, 1, false);

  CHECK(check_lattice_homomorphism(koopman_operator_under_test(flow), 1.0, dict, kGrid, 1e-12).pass);

  const OperatorUnderTest avg = averaging_operator(flow);
  const Observable wave = complex_exponential_observable(1.0);
  const StatePoint zero = StatePoint::scalar(0.0);
  const double lhs = std::abs(avg.apply(1.0, wave)(zero));
  const double rhs = avg.apply(1.0, modulus(wave))(zero).real();
  CHECK(lhs == Catch::Approx(std::abs((1.0 + std::exp(Complex{0.0, 1.0})) / 2.0)).margin(1e-14));
  CHECK(lhs == Catch::Approx(0.877583).margin(1e-6));
  CHECK(rhs == Catch::Approx(1.0).margin(1e-14));

  const auto rep = check_lattice_homomorphism(avg, 1.0, dict, kGrid, 0.05);
  CHECK_FALSE(rep.pass);
  CHECK(rep.find("modulus-preservation")->residual >= 0.1);
}

TEST_CASE("conjugation passes the lattice suite but fails linearity") {
  const Semiflow flow = make_translation_flow();
  const OperatorUnderTest conj_op = conjugation_operator(flow);
  const Dictionary dict = make_dictionary({complex_exponential_observable(1.0)}, 1, false);
  CHECK(check_lattice_homomorphism(conj_op, 1.0, dict, kGrid, 1e-12).pass);
  const auto lin = check_linearity(conj_op, 1.0, dict, kGrid, 1e-9);
  CHECK_FALSE(lin.pass);
  CHECK_FALSE(lin.find("homogeneity")->pass);  // conj(i f) = -i conj(f)
  CHECK(check_linearity(koopman_operator_under_test(flow), 1.0, dict, kGrid, 1e-12).pass);
}

TEST_CASE("derivation check: unit absorption and the product rule") {
  const Semiflow flow = make_translation_flow();
  const CompactSample grid = uniform_sample(0.05, 2.0, 20);

  CHECK(check_derivation(flow, unit_observable(), sin_observable(), grid, 1e-3, 1e-12).pass);

  const auto rep = check_derivation(flow, exp_decay_observable(1.0), sin_observable(), grid,
                                    1e-3, 1e-5);
  CHECK(rep.pass);
  CHECK(rep.find("product-rule")->residual < 1e-5);
}

TEST_CASE("derivation residual decays at order two in h") {
  const Semiflow flow = make_translation_flow();
  const CompactSample grid = uniform_sample(0.05, 2.0, 20);
  auto resid = [&](double h) {
    return check_derivation(flow, exp_decay_observable(1.0), sin_observable(), grid, h, 1e-12)
        .find("product-rule")
        ->residual;
  };
  CHECK(resid(1e-2) / resid(5e-3) >= 3.0);
  CHECK(resid(5e-3) / resid(2.5e-3) >= 3.0);
}

TEST_CASE("a squaring map is rejected as a derivation") {
  const Observable half = constant_observable({0.5, 0.0});
  auto square = [](const Observable& f) { return alg_product(f, f); };
  const auto rep = derivation_residual(square, half, half, uniform_sample(0.0, 1.0, 3), 1e-6);
  CHECK_FALSE(rep.pass);
  // delta(fg) = 1/16 versus delta(f) g + f delta(g) = 1/4: defect 3/16.
  CHECK(rep.find("product-rule")->residual == Catch::Approx(3.0 / 16.0).margin(1e-15));
}

TEST_CASE("kato equality: sign branch, zero branch, smooth positive case") {
  const Semiflow flow = make_translation_flow();
  const Observable f = clipped_affine(1.0, "x-1-clipped");
  const double eps = 1e-9 * (1.0 + f.bound);

  // f(2) = 1 != 0: equality via the sign branch, exact for an affine segment.
  const auto sign_branch = check_kato(flow, f, dirac(StatePoint::scalar(2.0)), 1e-3, eps, 1e-4);
  CHECK(sign_branch.pass);
  CHECK(sign_branch.find("kato-equality")->residual < 1e-4);

  // f(1) = 0 with orbit slope 1: the modulus branch gives |c| on both sides.
  const auto zero_branch = check_kato(flow, f, dirac(StatePoint::scalar(1.0)), 1e-3, eps, 1e-4);
  CHECK(zero_branch.pass);
  CHECK(zero_branch.find("kato-equality")->residual < 1e-4);

  // Strictly positive smooth f: reduces to generator/adjoint duality.
  AtomicMeasure mu;
  mu.atoms = {{StatePoint::scalar(0.0), {1.0, 0.0}}, {StatePoint::scalar(0.5), {0.5, 0.0}}};
  const Observable g = exp_decay_observable(1.0);
  const auto smooth = check_kato(flow, g, mu, 1e-3, 1e-9 * (1.0 + g.bound), 1e-6);
  CHECK(smooth.pass);
  CHECK(smooth.find("kato-equality")->residual < 1e-6);
}

TEST_CASE("classify recovers the translation point map") {
  const Semiflow flow = make_translation_flow();
  const Dictionary dict = make_dictionary({exp_decay_observable(1.0), sin_observable()}, 1, false);
  CompactSample grid;
  grid.points = {StatePoint::scalar(0.0), StatePoint::scalar(1.0), StatePoint::scalar(2.0)};
  const CompactSample candidates = uniform_sample(0.0, 4.0, 4001);

  const auto result = classify_operator(koopman_operator_under_test(flow), 1.0, dict, grid,
                                        candidates, 1e-9);
  CHECK(result.verdict == OperatorVerdict::KoopmanLike);
  REQUIRE(result.point_map.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(result.point_map[i][0] - (grid.points[i][0] + 1.0)) <= 1e-3);
  }
}

TEST_CASE("classify identifies the identity and rejects the averaging operator") {
  const Semiflow flow = make_translation_flow();
  const Dictionary dict = make_dictionary({exp_decay_observable(1.0), sin_observable()}, 1, false);
  CompactSample grid;
  grid.points = {StatePoint::scalar(0.5), StatePoint::scalar(1.5)};
  const CompactSample candidates = uniform_sample(0.0, 4.0, 2001);

  OperatorUnderTest identity{{[](double, const Observable& f) { return f; }}, "identity",
                             OperatorKind::BlackBox};
  const auto id_result = classify_operator(identity, 1.0, dict, grid, candidates, 1e-9);
  CHECK(id_result.verdict == OperatorVerdict::KoopmanLike);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(id_result.point_map[i][0] - grid.points[i][0]) <= 1e-3);
  }

  const auto avg_result = classify_operator(averaging_operator(flow), 1.0, dict, grid, candidates,
                                            0.05);
  CHECK(avg_result.verdict == OperatorVerdict::NotMultiplicative);
  CHECK(avg_result.point_map.empty());

  const auto conj_result = classify_operator(conjugation_operator(flow), 1.0, dict, grid,
                                             candidates, 1e-9);
  CHECK(conj_result.verdict == OperatorVerdict::NotLinear);

  const auto scaled_result = classify_operator(scaled_operator(flow, {2.0, 0.0}), 1.0, dict, grid,
                                               candidates, 1e-9);
  CHECK(scaled_result.verdict == OperatorVerdict::NotUnital);
}

TEST_CASE("classify demands separation and flags ambiguous matches") {
  const Semiflow flow = make_translation_flow();
  CompactSample grid;
  grid.points = {StatePoint::scalar(0.1), StatePoint::scalar(0.3)};

  // A constants-only dictionary separates nothing.
  const Dictionary constants = make_dictionary({}, 1, false);
  CHECK_THROWS_AS(classify_operator(koopman_operator_under_test(flow), 1.0, constants, grid,
                                    uniform_sample(0.0, 2.0, 201), 1e-9),
                  PreconditionError);

  // A 1-periodic dictionary separates the grid but not the candidate cloud.
  Observable wave{[](const StatePoint& x) {
                    return Complex{std::cos(2.0 * M_PI * x[0]), 0.0};
                  },
                  1.0, "cos2pi"};
  const Dictionary periodic = make_dictionary({wave}, 1, false);
  CHECK_THROWS_AS(classify_operator(koopman_operator_under_test(flow), 1.0, periodic, grid,
                                    uniform_sample(0.0, 2.0, 2001), 1e-9),
                  AmbiguousMatchError);
}

TEST_CASE("strong continuity spot-check of a black-box operator") {
  const Semiflow flow = make_translation_flow();
  const auto rep = strong_continuity_spotcheck(averaging_operator(flow), exp_decay_observable(1.0),
                                               1.0, {0.1, 0.01, 1e-4}, kGrid, 1e-3);
  CHECK(rep.pass);
}
