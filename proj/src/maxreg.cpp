#include "parlab/maxreg.hpp"

#include <cmath>
#include <stdexcept>

namespace parlab {

AutonomousKit::AutonomousKit(const CoefficientField& A, int piece, QuadratureConfig q)
    : op_(assemble_operator(A, piece)), spec_(op_), quad_(q) {
  if (!(q.abs_tol > 0.0))
    throw std::invalid_argument("AutonomousKit: quadrature tolerance <= 0");
}

namespace {

// phi1(z) = (e^z - 1)/z, stable near 0
Complex phi1(Complex z) {
  if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

double uniform_spacing(const std::vector<double>& t) {
  if (t.size() < 2) throw std::invalid_argument("maxreg: need >= 2 slices");
  const double dt = t[0];
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (std::abs(t[i + 1] - t[i] - dt) > 1e-10 * dt)
      throw std::invalid_argument("maxreg: slices must be uniformly spaced from 0");
  if (std::abs(t[0] - dt) > 1e-10 * dt)
    throw std::invalid_argument("maxreg: first slice must sit at one spacing");
  return dt;
}

// Panel values: interior panels take the endpoint average; the leading panel
// [0, dt] uses the first sample alone, which keeps the scheme causal.
std::vector<Vector> panel_values(const std::vector<Vector>& samples) {
  const std::size_t m = samples.size();
  std::vector<Vector> pan(m);
  pan[0] = samples[0];
  for (std::size_t j = 1; j < m; ++j) pan[j] = 0.5 * (samples[j - 1] + samples[j]);
  return pan;
}

// Shared causal accumulation: out(t_i) = sum_{m=1..i} W_m pan_{i-m}, with the
// per-panel weight W_m diagonal in the eigenbasis of L.
std::vector<Vector> causal_sum(const SpectralOperator& spec, double dt,
                               const std::vector<Vector>& panels,
                               const std::function<Complex(Complex, int)>& weight) {
  const std::size_t m = panels.size();
  const Eigen::Index N = panels[0].size();
  const auto& mu = spec.eigenvalues();

  std::vector<Vector> pan_modes(m);
  for (std::size_t j = 0; j < m; ++j) pan_modes[j] = spec.to_modes(panels[j]);

  std::vector<Eigen::VectorXcd> w(m + 1);
  for (std::size_t k = 1; k <= m; ++k) {
    w[k].resize(N);
    for (Eigen::Index i = 0; i < N; ++i) w[k](i) = weight(mu(i), static_cast<int>(k));
  }

  std::vector<Vector> out(m);
  for (std::size_t i = 1; i <= m; ++i) {
    Vector acc = Vector::Zero(N);
    for (std::size_t k = 1; k <= i; ++k)
      acc += w[k].cwiseProduct(pan_modes[i - k]);
    out[i - 1] = spec.from_modes(acc);
  }
  (void)dt;
  return out;
}

std::vector<Vector> scalar_samples(const SpaceTimeField& f) {
  std::vector<Vector> s;
  s.reserve(f.slices.size());
  for (const auto& sl : f.slices) s.push_back(sl.values);
  return s;
}

SpaceTimeField wrap(const SpaceTimeField& like, std::vector<Vector> values, int arity) {
  std::vector<SpaceField> slices;
  slices.reserve(values.size());
  for (auto& v : values)
    slices.push_back(SpaceField{like.grid, arity, std::move(v)});
  return make_space_time_field(like.grid, like.times, std::move(slices));
}

}  // namespace

SpaceTimeField apply_ML(const AutonomousKit& kit, const SpaceTimeField& f) {
  const double dt = uniform_spacing(f.times);
  for (const auto& s : f.slices)
    if (s.arity != 1) throw std::invalid_argument("apply_ML: scalar input expected");
  auto panels = panel_values(scalar_samples(f));
  // int over panel k of L e^{-tau L} dtau = e^{-(k-1) dt L} - e^{-k dt L}
  auto weight = [dt](Complex mu, int k) {
    return std::exp(-(k - 1) * dt * mu) - std::exp(-k * dt * mu);
  };
  return wrap(f, causal_sum(kit.spectral(), dt, panels, weight), 1);
}

namespace {

// common core of R_L and MtildeL: time-integrated semigroup against div f
std::vector<Vector> integrated_divergence(const AutonomousKit& kit,
                                          const SpaceTimeField& f) {
  const Grid& g = *kit.grid();
  const double dt = uniform_spacing(f.times);
  std::vector<Vector> divs;
  divs.reserve(f.slices.size());
  for (const auto& s : f.slices) {
    if (s.arity != g.dim)
      throw std::invalid_argument("maxreg: vector input of arity dim expected");
    divs.push_back(discrete_divergence(s).values);
  }
  auto panels = panel_values(divs);
  // int over panel k of e^{-tau L} dtau = dt e^{-(k-1) dt mu} phi1(-dt mu)
  auto weight = [dt](Complex mu, int k) {
    return dt * std::exp(-(k - 1) * dt * mu) * phi1(-dt * mu);
  };
  return causal_sum(kit.spectral(), dt, panels, weight);
}

}  // namespace

SpaceTimeField apply_RL(const AutonomousKit& kit, const SpaceTimeField& f) {
  return wrap(f, integrated_divergence(kit, f), 1);
}

SpaceTimeField apply_ML_tilde(const AutonomousKit& kit, const SpaceTimeField& f) {
  auto integ = integrated_divergence(kit, f);
  std::vector<Vector> grads;
  grads.reserve(integ.size());
  for (auto& v : integ)
    grads.push_back(discrete_gradient(SpaceField{f.grid, 1, std::move(v)}).values);
  return wrap(f, std::move(grads), kit.grid()->dim);
}

double estimate_operator_norm(const SpaceTimeOperator& op,
                              const SpaceTimeNorm& source_norm,
                              const SpaceTimeNorm& target_norm,
                              const std::vector<SpaceTimeField>& probes) {
  if (probes.size() < 16)
    throw std::invalid_argument("estimate_operator_norm: need >= 16 probes");
  double best = 0.0;
  for (const auto& p : probes) {
    double s = source_norm(p);
    if (!(s > 0.0)) continue;
    SpaceTimeField scaled = p;
    for (auto& sl : scaled.slices) sl.values /= s;
    for (auto& sl : scaled.gradient_slices) sl.values /= s;
    best = std::max(best, target_norm(op(scaled)));
  }
  return best;
}

}  // namespace parlab
