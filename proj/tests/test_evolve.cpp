#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parlab/evolve.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace parlab;
using nlohmann::json;
using testsupport::fourier_mode;
using testsupport::lap_eigenvalue;

namespace {

std::shared_ptr<const CoefficientField> heat_coeffs(GridPtr g, double T = 1.0) {
  return std::make_shared<CoefficientField>(
      make_scenario("heat", g, json::object(), T));
}

}  // namespace

TEST_CASE("assembled heat operator has the forward-difference spectrum") {
  auto g = build_grid(1, 8, 1.0);
  auto A = heat_coeffs(g);
  DiscreteOperator L = assemble_operator(*A, 0);
  Eigen::ComplexEigenSolver<Matrix> es(L.dense());
  std::vector<double> eig;
  for (int i = 0; i < 8; ++i) eig.push_back(es.eigenvalues()(i).real());
  std::sort(eig.begin(), eig.end());
  std::vector<double> expected;
  for (int k = 0; k < 8; ++k) expected.push_back(lap_eigenvalue(*g, k));
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 8; ++i)
    CHECK(eig[i] == doctest::Approx(expected[i]).epsilon(1e-10));
  CHECK(L.accretivity_certificate() >= 1.0 - 1e-10);
}

TEST_CASE("operator kills constants and is Hermitian for real symmetric A") {
  auto g = build_grid(2, 8, 1.0);
  auto A = std::make_shared<CoefficientField>(
      make_scenario("real_checkerboard", g, {{"lo", 0.5}, {"hi", 2.0}}));
  DiscreteOperator L = assemble_operator(*A, 0);
  Vector ones = Vector::Constant(g->cells(), 1.0);
  CHECK((L.apply(ones)).cwiseAbs().maxCoeff() <= 1e-14);
  Rng rng(5);
  for (int k = 0; k < 8; ++k) {
    Vector u(g->cells()), v(g->cells());
    for (int i = 0; i < g->cells(); ++i) {
      u(i) = rng.complex_sym();
      v(i) = rng.complex_sym();
    }
    Complex a = v.dot(L.apply(u));
    Complex b = L.apply(v).dot(u);
    CHECK(std::abs(a - b) <= 1e-13 * u.norm() * v.norm() * 100.0);
  }
}

TEST_CASE("semigroup step: identity at tau = 0 and CN Fourier symbol") {
  auto g = build_grid(1, 16, 1.0);
  auto A = heat_coeffs(g);
  DiscreteOperator L = assemble_operator(*A, 0);
  SpaceField u = make_field(g, fourier_mode(*g, 3));

  SpaceField same = semigroup_step(L, 0.0, u, Scheme{SchemeKind::exact_expm, 1});
  CHECK((same.values - u.values).norm() == 0.0);

  const double tau = 1e-3;
  const double mu = lap_eigenvalue(*g, 3);
  SpaceField cn = semigroup_step(L, tau, u, Scheme{SchemeKind::crank_nicolson, 1});
  Complex sym = (1.0 - tau * mu / 2.0) / (1.0 + tau * mu / 2.0);
  CHECK((cn.values - sym * u.values).norm() <= 1e-10 * u.values.norm());

  SpaceField be = semigroup_step(L, tau, u, Scheme{SchemeKind::backward_euler, 1});
  CHECK((be.values - u.values / (1.0 + tau * mu)).norm() <= 1e-10 * u.values.norm());
}

TEST_CASE("all schemes contract random data under a random elliptic operator") {
  auto g = build_grid(1, 32, 1.0);
  auto A = std::make_shared<CoefficientField>(
      testsupport::random_elliptic_staircase(g, 0.5, 2.0, 1, 1.0, 99));
  DiscreteOperator L = assemble_operator(*A, 0);
  Rng rng(17);
  for (auto kind : {SchemeKind::exact_expm, SchemeKind::crank_nicolson,
                    SchemeKind::backward_euler}) {
    for (int trial = 0; trial < 5; ++trial) {
      SpaceField u = random_field(g, rng);
      SpaceField v = semigroup_step(L, 0.37, u, Scheme{kind, 4});
      CHECK(l2_norm(v) <= l2_norm(u) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("propagator matches the heat Fourier oracle") {
  auto g = build_grid(1, 64, 4.0);
  auto A = heat_coeffs(g);
  Propagator P = build_propagator(A, Scheme{});
  Rng rng(23);
  SpaceField u0 = random_field(g, rng);
  SpaceField out = P.apply(0.7, 0.0, u0);
  Vector oracle = testsupport::heat_exact_1d(*g, u0.values, 0.7);
  CHECK((out.values - oracle).norm() <= 1e-10 * u0.values.norm());
}

TEST_CASE("propagator identity, chain rule, and conservation") {
  auto g = build_grid(1, 32, 1.0);
  auto A = std::make_shared<CoefficientField>(
      make_scenario("bv_staircase", g, {{"jumps", {0.2, 0.15}}}));
  Propagator P = build_propagator(A, Scheme{});
  Rng rng(31);
  SpaceField f = random_field(g, rng);

  CHECK((P.apply(0.4, 0.4, f).values - f.values).norm() == 0.0);

  // s on the factor path: both routes compose the same factors
  double s = A->breakpoints[1];
  SpaceField two = P.apply(0.9, s, P.apply(s, 0.1, f));
  SpaceField one = P.apply(0.9, 0.1, f);
  CHECK((two.values - one.values).norm() <= 1e-12 * f.values.norm());

  SpaceField ones = constant_field(g, 1.0);
  CHECK((P.apply(1.0, 0.0, ones).values.array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(P.apply(0.1, 0.5, f), std::invalid_argument);
}

TEST_CASE("two pieces, both endpoints inside the first piece") {
  auto g = build_grid(1, 16, 1.0);
  auto two = std::make_shared<CoefficientField>(
      make_scenario("bv_staircase", g, {{"jumps", {0.3}}}));
  auto one = heat_coeffs(g);
  Propagator P2 = build_propagator(two, Scheme{});
  Propagator P1 = build_propagator(one, Scheme{});
  // fall entirely inside piece 0 (identity coefficients in both fields)
  Rng rng(41);
  SpaceField f = random_field(g, rng);
  double s = 0.05, t = 0.3;  // first breakpoint is at 0.5
  CHECK((P2.apply(t, s, f).values - P1.apply(t, s, f).values).norm() <=
        1e-12 * f.values.norm());
}

TEST_CASE("adjoint pairing and reversed-field consistency") {
  auto g = build_grid(1, 24, 1.0);
  auto A = std::make_shared<CoefficientField>(
      testsupport::random_elliptic_staircase(g, 0.5, 2.0, 3, 1.0, 7));
  Propagator P = build_propagator(A, Scheme{});
  Rng rng(53);
  const double t = 0.85, s = 0.1;
  for (int k = 0; k < 5; ++k) {
    SpaceField f = random_field(g, rng);
    SpaceField h = random_field(g, rng);
    Complex a = inner(h, P.apply(t, s, f));
    Complex b = inner(P.adjoint_apply(t, s, h), f);
    CHECK(std::abs(a - b) <= 1e-12 * l2_norm(f) * l2_norm(h) * 10.0);
  }

  // adjoint equals the forward propagator of the reversed conjugate field
  auto R = std::make_shared<CoefficientField>(reversed_adjoint(*A, s, t));
  Propagator Q = build_propagator(R, Scheme{});
  SpaceField h = random_field(g, rng);
  SpaceField via_adjoint = P.adjoint_apply(t, s, h);
  SpaceField via_reversed = Q.apply(t - s, 0.0, h);
  CHECK((via_adjoint.values - via_reversed.values).norm() <=
        1e-11 * h.values.norm());

  // adjoint conservation
  SpaceField ones = constant_field(g, 1.0);
  CHECK((P.adjoint_apply(t, s, ones).values.array() - 1.0).abs().maxCoeff() <=
        1e-12);
}

TEST_CASE("real symmetric autonomous propagator is self-adjoint") {
  auto g = build_grid(1, 16, 1.0);
  auto A = std::make_shared<CoefficientField>(
      make_scenario("real_checkerboard", g, {{"lo", 0.5}, {"hi", 2.0}}));
  Propagator P = build_propagator(A, Scheme{});
  Matrix M = P.dense(0.6, 0.1);
  CHECK((M - M.adjoint()).norm() <= 1e-12 * M.norm());
}

TEST_CASE("kernel column: discrete oracle, mass, and reproducing identity") {
  auto g = build_grid(1, 64, 8.0);
  auto A = heat_coeffs(g);
  Propagator P = build_propagator(A, Scheme{});
  const int y = 13;
  const double t = 0.5, s = 0.1, r = 0.02;

  SpaceField col = P.kernel_column(t, s, y);
  // discrete Fourier oracle applied to the delta
  Vector delta = Vector::Zero(g->cells());
  delta(y) = 1.0 / g->cell_volume();
  Vector oracle = testsupport::heat_exact_1d(*g, delta, t - s);
  CHECK((col.values - oracle).norm() <= 1e-10 * oracle.norm());

  // column mass
  double mass = (g->cell_volume() * col.values.sum()).real();
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  // reproducing identity through an intermediate time
  SpaceField col_r = P.kernel_column(t, r, y);
  SpaceField composed = P.apply(t, s, P.kernel_column(s, r, y));
  CHECK((composed.values - col_r.values).norm() <= 1e-10 * col_r.values.norm());

  CHECK_THROWS_AS(P.kernel_column(0.5, 0.5, y), std::invalid_argument);
}

TEST_CASE("kernel column approximates the periodized Gaussian") {
  auto g = build_grid(1, 128, 16.0);
  auto A = heat_coeffs(g, 110.0);
  Propagator P = build_propagator(A, Scheme{});
  const double tau = 100.0;
  SpaceField col = P.kernel_column(tau, 0.0, 20);
  Vector oracle = testsupport::periodized_gaussian_1d(*g, 20, tau);
  CHECK((col.values - oracle).norm() / oracle.norm() <= 1e-8);
}

TEST_CASE("contraction of random complex elliptic staircases (dense SVD)") {
  auto g = build_grid(1, 48, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    auto A = std::make_shared<CoefficientField>(
        testsupport::random_elliptic_staircase(g, 0.5, 2.0, 3, 1.0, 100 + trial));
    Propagator P = build_propagator(A, Scheme{});
    Rng rng(trial);
    for (int k = 0; k < 3; ++k) {
      double a = rng.uniform(), b = rng.uniform();
      Matrix M = P.dense(std::max(a, b), std::min(a, b));
      Eigen::JacobiSVD<Matrix> svd(M);
      CHECK(svd.singularValues()(0) <= 1.0 + 1e-10);
    }
  }
}

TEST_CASE("Crank-Nicolson halves-squares the error under substep doubling") {
  auto g = build_grid(1, 32, 1.0);
  auto A = heat_coeffs(g);
  Propagator exact = build_propagator(A, Scheme{});
  // smooth datum: the substep sizes sit in the second-order regime
  SpaceField u0 = make_field(g, fourier_mode(*g, 1));
  SpaceField ref = exact.apply(0.5, 0.0, u0);
  auto err = [&](int substeps) {
    Propagator cn = build_propagator(A, Scheme{SchemeKind::crank_nicolson, substeps});
    return (cn.apply(0.5, 0.0, u0).values - ref.values).norm();
  };
  double e1 = err(64), e2 = err(128);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("exact flow agrees with the propagator across pieces") {
  auto g = build_grid(1, 32, 1.0);
  auto A = std::make_shared<CoefficientField>(
      testsupport::random_elliptic_staircase(g, 0.5, 2.0, 4, 1.0, 1234));
  Propagator P = build_propagator(A, Scheme{});
  ExactFlow flow(A);
  Rng rng(3);
  SpaceField u0 = random_field(g, rng);
  for (double t : {0.1, 0.35, 0.75, 1.0}) {
    Vector a = P.apply(t, 0.0, u0).values;
    Vector b = flow.state(u0.values, t);
    CHECK((a - b).norm() <= 1e-10 * u0.values.norm());
  }
  auto sampled = flow.sample(u0, {0.2, 0.5, 0.9}, true);
  CHECK(sampled.slices.size() == 3);
  CHECK(sampled.has_gradients());
  CHECK((sampled.slices[1].values - P.apply(0.5, 0.0, u0).values).norm() <=
        1e-10 * u0.values.norm());
}

TEST_CASE("discrete energy equality along the exact flow") {
  auto g = build_grid(1, 16, 4.0);
  auto A = std::make_shared<CoefficientField>(
      testsupport::random_elliptic_staircase(g, 0.5, 2.0, 2, 1.0, 5));
  ExactFlow flow(A);
  Rng rng(2);
  SpaceField u0 = random_mean_zero_field(g, rng);
  const double T = 1.0;
  const int n = g->cells();
  auto form = [&](double t) {
    Vector u = flow.state(u0.values, t);
    SpaceField gr = discrete_gradient(make_field(g, u));
    const auto& piece = A->pieces[A->piece_at(t)];
    Complex acc = 0.0;
    for (int i = 0; i < n; ++i) {
      Complex gv = gr.values(i);
      acc += piece[i](0, 0) * gv * std::conj(gv);
    }
    return 2.0 * g->cell_volume() * acc.real();
  };
  // midpoint panels on dyadic time bands, resolving the initial layer of the
  // rough datum
  double dissipated = 0.0;
  const int bands = 28, per_band = 4096;
  double lo_band = T * std::pow(2.0, -bands);
  for (int b = 0; b < bands; ++b) {
    double lo = T * std::pow(2.0, -(b + 1)), hi = T * std::pow(2.0, -b);
    for (int j = 0; j < per_band; ++j)
      dissipated += (hi - lo) / per_band * form(lo + (hi - lo) * (j + 0.5) / per_band);
  }
  dissipated += lo_band * form(0.5 * lo_band);
  double n0 = std::pow(l2_norm(u0), 2);
  double nT = g->cell_volume() * flow.state(u0.values, T).squaredNorm();
  CHECK(std::abs(n0 - dissipated - nT) <= 1e-8 * n0);
}

TEST_CASE("duhamel residual: autonomous match, conservation, perturbation") {
  auto g = build_grid(1, 32, 1.0);

  // A equal to the reference: integrand vanishes identically
  auto heat = heat_coeffs(g);
  Propagator Ph = build_propagator(heat, Scheme{});
  CoeffSample ref(g->cells(), Eigen::Matrix2cd::Zero());
  for (int i = 0; i < g->cells(); ++i) ref[i](0, 0) = 1.0;
  Rng rng(8);
  SpaceField h = random_mean_zero_field(g, rng);
  CHECK(duhamel_residual(Ph, ref, h, 1.0) <= 1e-12);

  // constant datum: both sides equal 1
  SpaceField ones = constant_field(g, 1.0);
  auto pert = std::make_shared<CoefficientField>(
      make_scenario("complex_perturb", g, {{"epsilon", 0.05}}, 1.0, 11));
  Propagator Pp = build_propagator(pert, Scheme{});
  CHECK(duhamel_residual(Pp, ref, ones, 1.0) <= 1e-10);

  // genuine perturbation: quadrature-refined defect
  CHECK(duhamel_residual(Pp, ref, h, 1.0) <= 1e-7);
}
