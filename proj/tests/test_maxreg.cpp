#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "parlab/maxreg.hpp"
#include "parlab/norms.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace parlab;
using nlohmann::json;

namespace {

AutonomousKit heat_kit(GridPtr g) {
  auto A = make_scenario("heat", g, json::object());
  return AutonomousKit(A, 0);
}

std::vector<double> slice_times(double T, int count) {
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = T * (i + 1) / count;
  return t;
}

SpaceTimeField sampled(GridPtr g, const std::vector<double>& times,
                       const std::function<Vector(double)>& fn, int arity = 1) {
  std::vector<SpaceField> slices;
  for (double t : times) slices.push_back(SpaceField{g, arity, fn(t)});
  return make_space_time_field(g, times, slices);
}

// spectral evaluation of phi(mu_k) acting on a 1d field via the plain DFT
Vector spectral_apply_1d(const Grid& g, const Vector& u,
                         const std::function<Complex(double)>& phi) {
  const int n = g.points_per_axis;
  Vector coef(n);
  for (int k = 0; k < n; ++k) {
    Complex c = 0.0;
    for (int x = 0; x < n; ++x) {
      double p = 2.0 * M_PI * double(k) * x / n;
      c += u(x) * Complex(std::cos(p), -std::sin(p));
    }
    coef(k) = c / double(n);
  }
  Vector out = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    Complex amp = coef(k) * phi(testsupport::lap_eigenvalue(g, k));
    for (int x = 0; x < n; ++x) {
      double p = 2.0 * M_PI * double(k) * x / n;
      out(x) += amp * Complex(std::cos(p), std::sin(p));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("M_L of zero and of constants vanishes") {
  auto g = build_grid(1, 16, 8.0);
  auto kit = heat_kit(g);
  auto times = slice_times(1.0, 64);
  auto zero = sampled(g, times, [&](double) { return Vector::Zero(g->cells()); });
  auto out = apply_ML(kit, zero);
  for (const auto& s : out.slices) CHECK(l2_norm(s) == 0.0);

  // constant-in-space datum sits in the kernel of L
  auto ones = sampled(g, times, [&](double) {
    return Vector::Constant(g->cells(), Complex(1.0, -0.5));
  });
  auto out1 = apply_ML(kit, ones);
  for (const auto& s : out1.slices) CHECK(l2_norm(s) <= 1e-13);
}

TEST_CASE("M_L reproduces the semigroup algebra closed form") {
  // f(s) = e^{-sL} g  =>  M_L f(t) = t L e^{-tL} g
  auto g = build_grid(1, 32, 16.0);
  auto kit = heat_kit(g);
  SpaceField gdat = make_field(g, testsupport::fourier_mode(*g, 1));
  const double mu = testsupport::lap_eigenvalue(*g, 1);
  auto times = slice_times(1.0, 4096);
  auto f = sampled(g, times, [&](double s) {
    return Vector(std::exp(-s * mu) * gdat.values);
  });
  auto out = apply_ML(kit, f);
  // final slice against the closed form, tight tolerance
  const double T = times.back();
  Vector closed = T * mu * std::exp(-T * mu) * gdat.values;
  CHECK((out.slices.back().values - closed).norm() <= 1e-8 * closed.norm());
  // every slice at a uniform tolerance
  double sup = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    Vector ci = times[i] * mu * std::exp(-times[i] * mu) * gdat.values;
    sup = std::max(sup, (out.slices[i].values - ci).norm() / gdat.values.norm());
  }
  CHECK(sup <= 1e-6);
}

TEST_CASE("M_L tilde matches the Fourier oracle for gradient data") {
  // f = grad e^{-sL} g  =>  Mtilde_L f(t) = -grad(t L e^{-tL} g)
  auto g = build_grid(1, 32, 16.0);
  auto kit = heat_kit(g);
  SpaceField gdat = make_field(g, testsupport::fourier_mode(*g, 1) +
                                      0.5 * testsupport::fourier_mode(*g, 2));
  auto times = slice_times(1.0, 8192);
  ExactFlow flow(std::make_shared<CoefficientField>(
      make_scenario("heat", g, json::object())));
  auto f = sampled(g, times, [&](double s) {
    return discrete_gradient(flow.state(gdat, s)).values;
  }, g->dim);
  auto out = apply_ML_tilde(kit, f);
  const double T = times.back();
  Vector w = spectral_apply_1d(*g, gdat.values, [&](double mu) {
    return Complex(-T * mu * std::exp(-T * mu));
  });
  Vector closed = discrete_gradient(make_field(g, w)).values;
  CHECK((out.slices.back().values - closed).norm() <=
        1e-8 * std::max(1.0, closed.norm()));

  // R_L on the same data: -t L e^{-tL} g
  auto rout = apply_RL(kit, f);
  CHECK((rout.slices.back().values - w).norm() <= 1e-8 * std::max(1.0, w.norm()));
}

TEST_CASE("constant-in-space vector data is annihilated by the divergence") {
  auto g = build_grid(1, 16, 8.0);
  auto kit = heat_kit(g);
  auto times = slice_times(1.0, 64);
  auto f = sampled(g, times, [&](double) {
    return Vector::Constant(g->cells(), Complex(0.3, 0.7));
  }, 1);
  auto out = apply_ML_tilde(kit, f);
  for (const auto& s : out.slices) CHECK(l2_norm(s) <= 1e-13);
  auto rout = apply_RL(kit, f);
  for (const auto& s : rout.slices) CHECK(l2_norm(s) <= 1e-13);
}

TEST_CASE("gradient of R_L equals Mtilde_L on random probes") {
  for (auto scenario : {"heat", "real_checkerboard", "complex_perturb"}) {
    auto g = build_grid(1, 24, 8.0);
    auto A = make_scenario(scenario, g, json::object(), 1.0, 3);
    AutonomousKit kit(A, 0);
    auto times = slice_times(1.0, 96);
    Rng rng(mix_seed(5, scenario));
    for (int probe = 0; probe < 20; ++probe) {
      auto f = sampled(g, times, [&](double) {
        Vector v(g->cells());
        for (int i = 0; i < g->cells(); ++i) v(i) = rng.complex_sym();
        return v;
      }, g->dim);
      auto lhs = apply_RL(kit, f);
      auto rhs = apply_ML_tilde(kit, f);
      double worst = 0.0;
      for (std::size_t i = 0; i < times.size(); ++i) {
        Vector glhs = discrete_gradient(lhs.slices[i]).values;
        worst = std::max(worst, (glhs - rhs.slices[i].values).norm());
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("causality: later slices do not affect earlier output") {
  auto g = build_grid(1, 16, 8.0);
  auto kit = heat_kit(g);
  auto times = slice_times(1.0, 32);
  Rng rng(6);
  auto f = sampled(g, times, [&](double) {
    Vector v(g->cells());
    for (int i = 0; i < g->cells(); ++i) v(i) = rng.complex_sym();
    return v;
  });
  auto g2 = f;
  for (std::size_t q = 20; q < times.size(); ++q)
    g2.slices[q].values.setConstant(Complex(9.0, -9.0));
  auto a = apply_ML(kit, f);
  auto b = apply_ML(kit, g2);
  for (std::size_t q = 0; q < 20; ++q)
    CHECK((a.slices[q].values - b.slices[q].values).norm() == 0.0);
}

TEST_CASE("linearity of the three operators") {
  auto g = build_grid(1, 16, 8.0);
  auto kit = heat_kit(g);
  auto times = slice_times(1.0, 48);
  Rng rng(7);
  auto mk = [&](int arity) {
    return sampled(g, times, [&](double) {
      Vector v(g->cells() * 0 + g->cells());
      for (int i = 0; i < g->cells(); ++i) v(i) = rng.complex_sym();
      return v;
    }, arity);
  };
  const Complex a(0.3, -1.1), b(-2.0, 0.4);
  auto f1 = mk(1), f2 = mk(1);
  auto combo = f1;
  for (std::size_t q = 0; q < times.size(); ++q)
    combo.slices[q].values = a * f1.slices[q].values + b * f2.slices[q].values;
  auto lhs = apply_ML(kit, combo);
  auto r1 = apply_ML(kit, f1);
  auto r2 = apply_ML(kit, f2);
  for (std::size_t q = 0; q < times.size(); ++q) {
    Vector want = a * r1.slices[q].values + b * r2.slices[q].values;
    CHECK((lhs.slices[q].values - want).norm() <=
          1e-11 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("operator norm estimation basics") {
  auto g = build_grid(1, 16, 4.0);
  auto times = slice_times(1.0, 16);
  Rng rng(8);
  std::vector<SpaceTimeField> probes;
  for (int k = 0; k < 16; ++k)
    probes.push_back(sampled(g, times, [&](double) {
      Vector v(g->cells());
      for (int i = 0; i < g->cells(); ++i) v(i) = rng.complex_sym();
      return v;
    }));
  auto l2l2 = [&](const SpaceTimeField& f) {
    double acc = 0.0;
    for (const auto& s : f.slices) acc += std::pow(l2_norm(s), 2) / times.size();
    return std::sqrt(acc);
  };
  auto zero_op = [&](const SpaceTimeField& f) {
    auto out = f;
    for (auto& s : out.slices) s.values.setZero();
    return out;
  };
  auto id_op = [](const SpaceTimeField& f) { return f; };
  CHECK(estimate_operator_norm(zero_op, l2l2, l2l2, probes) == 0.0);
  CHECK(estimate_operator_norm(id_op, l2l2, l2l2, probes) >= 1.0 - 1e-12);
  std::vector<SpaceTimeField> few(probes.begin(), probes.begin() + 4);
  CHECK_THROWS_AS(estimate_operator_norm(id_op, l2l2, l2l2, few),
                  std::invalid_argument);
}

TEST_CASE("M_L L2(L2) estimate is stable under grid refinement") {
  // probes are fixed physical fields (low Fourier modes with seeded weights
  // and seeded slice envelopes), resolvable on both grids
  auto run = [&](int n) {
    auto g = build_grid(1, n, 8.0);
    auto kit = heat_kit(g);
    auto times = slice_times(1.0, 64);
    Rng rng(9);
    std::vector<SpaceTimeField> probes;
    for (int k = 0; k < 16; ++k) {
      std::vector<Complex> weights;
      for (int m = 1; m <= 6; ++m) weights.push_back(rng.complex_sym());
      Vector base = Vector::Zero(g->cells());
      for (int m = 1; m <= 6; ++m)
        base += weights[m - 1] * testsupport::fourier_mode(*g, m);
      std::vector<Complex> envelope;
      for (std::size_t q = 0; q < times.size(); ++q)
        envelope.push_back(rng.complex_sym());
      std::size_t idx = 0;
      probes.push_back(sampled(g, times, [&](double) {
        return Vector(envelope[idx++] * base);
      }));
    }
    auto l2l2 = [&](const SpaceTimeField& f) {
      double acc = 0.0;
      for (const auto& s : f.slices)
        acc += std::pow(l2_norm(s), 2) * (times[0]);
      return std::sqrt(acc);
    };
    return estimate_operator_norm(
        [&](const SpaceTimeField& f) { return apply_ML(kit, f); }, l2l2, l2l2,
        probes);
  };
  double a = run(32), b = run(64);
  CHECK(std::abs(a / b - 1.0) <= 0.25);
}

TEST_CASE("slices must be uniform from one spacing") {
  auto g = build_grid(1, 16, 4.0);
  auto kit = heat_kit(g);
  Rng rng(10);
  auto bad = sampled(g, {0.1, 0.3, 0.35}, [&](double) {
    Vector v(g->cells());
    for (int i = 0; i < g->cells(); ++i) v(i) = rng.complex_sym();
    return v;
  });
  CHECK_THROWS_AS(apply_ML(kit, bad), std::invalid_argument);
}
