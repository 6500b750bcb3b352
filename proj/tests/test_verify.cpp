#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parlab/verify.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace parlab;
using nlohmann::json;

namespace {

std::shared_ptr<const CoefficientField> scenario(const std::string& name,
                                                 GridPtr g, json params,
                                                 double T = 1.0,
                                                 std::uint64_t seed = 1) {
  return std::make_shared<CoefficientField>(
      make_scenario(name, g, params, T, seed));
}

double row(const CheckReport& r, const std::string& name) {
  for (const auto& m : r.rows)
    if (m.name == name) return m.measured;
  FAIL("missing row ", name);
  return 0.0;
}

}  // namespace

TEST_CASE("contraction check on heat and on random complex staircases") {
  auto g = build_grid(1, 32, 1.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  auto rep = check_contraction(P, 1);
  CHECK(rep.pass);
  // constants are preserved, so the top singular value is exactly 1
  CHECK(row(rep, "sigma_max") == doctest::Approx(1.0).epsilon(1e-10));

  for (std::uint64_t s : {11u, 12u}) {
    auto A = std::make_shared<CoefficientField>(
        testsupport::random_elliptic_staircase(g, 0.5, 2.0, 3, 1.0, s));
    auto repc = check_contraction(build_propagator(A, Scheme{}), s);
    CHECK(repc.pass);
  }
}

TEST_CASE("off-diagonal Gaffney bound with the explicit rate") {
  auto g = build_grid(1, 128, 16.0);
  // tau = 1, distances m: d^2/(t-s) = m^2
  const double tau = 1.0;
  auto cells_in = [&](double lo, double hi) {
    std::vector<int> out;
    for (int i = 0; i < g->cells(); ++i) {
      double x = i * g->spacing;
      if (x >= lo && x < hi) out.push_back(i);
    }
    return out;
  };

  Propagator Ph = build_propagator(scenario("heat", g, {}, 2.0), Scheme{});
  auto E = cells_in(0.0, 2.0);
  for (int m : {1, 2, 3, 4, 5}) {
    auto F = cells_in(2.0 + m, 4.0 + m);
    auto rep = check_offdiagonal(Ph, E, F, tau, 0.0);
    CHECK(rep.pass);
    CHECK(row(rep, "ratio_d2_tau") >= m * m * 0.99);
  }

  Propagator Pc = build_propagator(
      scenario("real_checkerboard", g, {{"lo", 0.5}, {"hi", 2.0}}, 2.0), Scheme{});
  CHECK(Pc.coefficients().ellipticity.alpha == doctest::Approx(1.0 / 32.0));
  for (int m : {1, 2, 3, 4}) {
    auto F = cells_in(2.0 + m, 4.0 + m);
    CHECK(check_offdiagonal(Pc, E, F, tau, 0.0).pass);
  }

  // adjacent sets: the bound is 1 and holds trivially
  auto rep0 = check_offdiagonal(Ph, cells_in(0.0, 2.0), cells_in(2.0, 4.0), tau, 0.0);
  CHECK(rep0.pass);

  CHECK_THROWS_AS(check_offdiagonal(Ph, E, E, tau, 0.0), std::invalid_argument);
}

TEST_CASE("conservation check across schemes") {
  auto g = build_grid(1, 32, 1.0);
  auto A = scenario("bv_staircase", g, {{"jumps", {0.2, 0.1}}});
  CHECK(check_conservation(build_propagator(A, Scheme{}), 1).pass);
  CHECK(check_conservation(
            build_propagator(A, Scheme{SchemeKind::crank_nicolson, 8}), 1)
            .pass);
  CHECK(check_conservation(build_propagator(scenario("heat", g, {}), Scheme{}), 1)
            .pass);
}

TEST_CASE("norm equivalence chain: single mode and scenarios") {
  auto g = build_grid(1, 32, 4.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  SpaceField mode = make_field(g, testsupport::fourier_mode(*g, 1));
  auto rep = check_norm_equivalence(P, mode);
  CHECK(rep.pass);
  // for a single heat mode the whole chain collapses to equalities
  for (const auto& m : rep.rows)
    if (m.name == "chain_mid" || m.name == "chain_right")
      CHECK(m.slack == doctest::Approx(1.0 / 1.02).epsilon(1e-3));

  // zero datum short-circuits
  auto zero = check_norm_equivalence(P, zero_field(g));
  CHECK(zero.pass);

  Propagator Pc = build_propagator(
      scenario("real_checkerboard", g, {{"lo", 0.5}, {"hi", 2.0}}), Scheme{});
  Rng rng(3);
  CHECK(check_norm_equivalence(Pc, random_mean_zero_field(g, rng)).pass);
}

TEST_CASE("energy equality check") {
  auto g = build_grid(1, 32, 4.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  SpaceField mode = make_field(g, testsupport::fourier_mode(*g, 2));
  auto rep = check_energy_equality(P, mode, 1.0);
  CHECK(rep.pass);
  CHECK(row(rep, "residual") <= 1e-10);

  // constant datum: nothing dissipates
  auto repc = check_energy_equality(P, constant_field(g, 2.0), 1.0);
  CHECK(repc.pass);
  CHECK(row(repc, "residual") <= 1e-12);

  Propagator Pp = build_propagator(
      scenario("complex_perturb", g, {{"epsilon", 0.05}}, 1.0, 9), Scheme{});
  Rng rng(4);
  auto repp = check_energy_equality(Pp, random_mean_zero_field(g, rng), 1.0);
  CHECK(repp.pass);
}

TEST_CASE("interior representation: self and constants") {
  auto g = build_grid(1, 24, 1.0);
  auto A = scenario("complex_perturb", g, {{"epsilon", 0.1}}, 1.0, 5);
  Propagator P = build_propagator(A, Scheme{});
  ExactFlow flow(A);
  Rng rng(6);
  SpaceField u0 = random_mean_zero_field(g, rng);
  auto u = flow.sample(u0, {1.0 / 3.0, 2.0 / 3.0}, false);
  auto rep = check_interior_representation(P, u, 1.0 / 3.0, 2.0 / 3.0, 7, 1e-10);
  CHECK(rep.pass);
  CHECK(row(rep, "pairing_residual") <= 1e-12);
}

TEST_CASE("reverse Hoelder ratios are refinement-stable") {
  ScenarioSpec sc;
  sc.name = "real_checkerboard";
  sc.params = {{"lo", 0.5}, {"hi", 2.0}};
  sc.dim = 1;
  sc.points_per_axis = 64;
  sc.period = 16.0;
  sc.horizon = 1.0;
  auto rep = check_reverse_holder(sc, 1);
  CHECK(rep.pass);
  CHECK(row(rep, "ratio_sup_coarse") > 0.0);
  CHECK(row(rep, "q_exponent") == doctest::Approx(6.0));
}

TEST_CASE("local energy bounds hold with the measured cutoff") {
  auto g = build_grid(1, 64, 16.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  // heat mode: both sides in closed form through the flow
  SpaceField mode = make_field(g, testsupport::fourier_mode(*g, 2));
  auto rep = check_local_energy(P, mode, 0, 2.0, 0.25, 0.75);
  CHECK(rep.pass);
  // constant datum: gradient term vanishes
  auto repc = check_local_energy(P, constant_field(g, 1.0), 0, 2.0, 0.25, 0.75);
  CHECK(repc.pass);
  CHECK(row(repc, "gradient_mass") == doctest::Approx(0.0).epsilon(1e-14));
  // cylinder covering the torus: reduces to the global energy inequality
  auto repg = check_local_energy(P, mode, 0, 10.0, 0.25, 0.75);
  CHECK(repg.pass);
}

TEST_CASE("maximal vs square function comparability") {
  ScenarioSpec sc;
  sc.name = "heat";
  sc.params = json::object();
  sc.dim = 1;
  sc.points_per_axis = 64;
  sc.period = 8.0;
  sc.horizon = 1.0;
  auto rep = check_max_square(sc, {1.0, 2.0, 4.0}, 6, 1);
  CHECK(rep.pass);
}

TEST_CASE("structural bound with the exact semidiscrete derivative") {
  auto g = build_grid(1, 32, 4.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  SpaceField mode = make_field(g, testsupport::fourier_mode(*g, 1));
  auto rep = check_struct_bound(P, mode);
  CHECK(rep.pass);
  // single mode collapses to equality; the 5% gate leaves the slack near 1/1.05
  CHECK(row(rep, "linf_l2") == doctest::Approx(l2_norm(mode)).epsilon(1e-12));

  CHECK(check_struct_bound(P, zero_field(g)).pass);

  // homogeneity: scaling the datum leaves the slack invariant
  SpaceField scaled = mode;
  scaled.values *= 17.0;
  auto rep2 = check_struct_bound(P, scaled);
  CHECK(rep2.rows.back().slack ==
        doctest::Approx(rep.rows.back().slack).epsilon(1e-10));
}

TEST_CASE("Whitney-Fatou convergence for step and smooth data") {
  auto g = build_grid(1, 64, 16.0);
  Propagator P = build_propagator(
      scenario("real_checkerboard", g, {{"lo", 0.5}, {"hi", 2.0}}, 2.0), Scheme{});
  Vector v(g->cells());
  for (int i = 0; i < g->cells(); ++i)
    v(i) = (i < g->points_per_axis / 2) ? 1.0 : -1.0;
  auto rep = check_whitney_fatou(P, make_field(g, v), 7);
  CHECK(rep.pass);

  // constant datum: zero error at every level
  auto repc = check_whitney_fatou(P, constant_field(g, 3.0), 5);
  CHECK(repc.pass);
  CHECK(row(repc, "final_error") <= 1e-12);
}

TEST_CASE("BV uniformity across partitions, and continuity toward p = 2") {
  ScenarioSpec sc;
  sc.name = "bv_staircase";
  sc.params = json::object();
  sc.dim = 1;
  sc.points_per_axis = 48;
  sc.period = 8.0;
  sc.horizon = 1.0;
  auto rep = check_bv_uniformity(sc, 1.5, {0.5}, {1, 2, 4, 8, 16}, 1);
  CHECK(rep.pass);

  // autonomous: the lp norms stay at 1 for every sampled time
  auto g = build_grid(1, 48, 8.0);
  Propagator P = build_propagator(scenario("heat", g, {}), Scheme{});
  for (double t : {0.25, 0.5, 1.0})
    CHECK(lp_operator_norm(P.dense(t, 0.0), 1.5, 3) <= 1.0 + 1e-10);

  // p close to 2: contraction within 2%
  auto A = scenario("bv_staircase", g, {{"budget", 0.5}, {"K", 4}});
  Propagator Pb = build_propagator(A, Scheme{});
  CHECK(lp_operator_norm(Pb.dense(1.0, 0.0), 1.9, 3) <= 1.02);
}

TEST_CASE("lp operator norm estimator sanity") {
  Matrix I = Matrix::Identity(12, 12);
  CHECK(lp_operator_norm(I, 1.5, 1) == doctest::Approx(1.0));
  Matrix D = Matrix::Zero(12, 12);
  D.diagonal().setConstant(2.0);
  CHECK(lp_operator_norm(D, 1.5, 1) == doctest::Approx(2.0));
  // lower bound against direct probing
  Rng rng(2);
  Matrix M(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) M(i, j) = rng.complex_sym();
  double est = lp_operator_norm(M, 1.5, 4);
  auto lp = [](const Vector& v, double e) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      acc += std::pow(std::abs(v(i)), e);
    return std::pow(acc, 1.0 / e);
  };
  for (int trial = 0; trial < 200; ++trial) {
    Vector x(8);
    for (int i = 0; i < 8; ++i) x(i) = rng.complex_sym();
    CHECK(lp(M * x, 1.5) <= est * lp(x, 1.5) * (1.0 + 1e-9));
  }
}

TEST_CASE("Gaussian kernel fit: heat recovers the exact constants") {
  ScenarioSpec sc;
  sc.name = "heat";
  sc.params = json::object();
  sc.dim = 1;
  sc.points_per_axis = 64;
  sc.period = 16.0;
  sc.horizon = 1.0;
  auto rep = check_kernel_gaussian(sc, 1);
  CHECK(rep.pass);
  double c_fit = row(rep, "c_fine");
  double C_fit = row(rep, "C_fine");
  CHECK(c_fit >= 0.9);
  CHECK(c_fit <= 1.3);
  CHECK(C_fit == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(0.2));

  // complex coefficients: skipped with an explicit status
  ScenarioSpec scc = sc;
  scc.name = "complex_perturb";
  scc.params = {{"epsilon", 0.05}};
  auto repc = check_kernel_gaussian(scc, 1);
  CHECK(repc.pass);
  CHECK(repc.tolerance_policy.find("skipped") != std::string::npos);

  ScenarioSpec scb = sc;
  scb.name = "real_checkerboard";
  scb.params = {{"lo", 0.5}, {"hi", 2.0}};
  auto repb = check_kernel_gaussian(scb, 1);
  CHECK(repb.pass);
}

TEST_CASE("duhamel check ids and registry dispatch") {
  CHECK(is_known_check("contraction"));
  CHECK(is_known_check("check_contraction"));
  CHECK_FALSE(is_known_check("no_such"));
  CHECK(canonical_check_id("offdiagonal") == "check_offdiagonal");

  // descriptors are alphabetical and complete
  const auto& d = check_descriptors();
  CHECK(d.size() == 14);
  for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i].id < d[i + 1].id);

  // dispatch through the registry on a small context
  RunContext ctx;
  ctx.grid = build_grid(1, 32, 8.0);
  ctx.coeffs = scenario("heat", ctx.grid, {}, 1.0);
  ctx.prop = std::make_shared<Propagator>(ctx.coeffs, Scheme{});
  ctx.horizon = 1.0;
  ctx.seed = 2;
  ctx.scenario = ScenarioSpec{"heat", json::object(), 1, 32, 8.0, 1.0, 2};
  ctx.overrides = json::object();
  auto rep = run_check("conservation", ctx);
  CHECK(rep.check_id == "check_conservation");
  CHECK(rep.pass);
  CHECK_THROWS(run_check("bogus", ctx));
}

TEST_CASE("checks are deterministic given the seed") {
  auto g = build_grid(1, 32, 1.0);
  auto A = scenario("complex_perturb", g, {{"epsilon", 0.1}}, 1.0, 3);
  Propagator P = build_propagator(A, Scheme{});
  auto a = check_contraction(P, 5);
  auto b = check_contraction(P, 5);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i)
    CHECK(a.rows[i].measured == b.rows[i].measured);
}
