#include "parlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parlab {

NormConfig make_norm_config(double horizon, int delta_levels, double t_min) {
  if (!(horizon > 0.0)) throw std::invalid_argument("norm config: horizon <= 0");
  NormConfig cfg;
  cfg.horizon = horizon;
  cfg.t_min = t_min > 0.0 ? t_min : horizon * std::pow(2.0, -16);
  if (!(cfg.t_min < horizon)) throw std::invalid_argument("norm config: t_min >= T");
  for (int j = 0; j <= delta_levels; ++j) {
    double d = horizon * std::pow(2.0, -j);
    if (d > cfg.t_min) cfg.delta_grid.push_back(d);
  }
  if (cfg.delta_grid.empty())
    throw std::invalid_argument("norm config: empty delta grid");
  return cfg;
}

std::vector<double> geometric_times(double horizon, double floor, int per_octave) {
  std::vector<double> out;
  for (int q = 0;; ++q) {
    double t = horizon * std::pow(2.0, -static_cast<double>(q) / per_octave);
    if (t <= floor) break;
    out.push_back(t);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

void NormReport::set(const std::string& name, double v) {
  for (auto& kv : values)
    if (kv.first == name) {
      kv.second = v;
      return;
    }
  values.emplace_back(name, v);
}

double NormReport::get(const std::string& name) const {
  for (const auto& kv : values)
    if (kv.first == name) return kv.second;
  throw std::out_of_range("NormReport: no entry '" + name + "'");
}

double lebesgue_norm(const SpaceField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lebesgue_norm: p must be >= 1");
  RealVector mag = pointwise_sq(f).cwiseSqrt();
  if (std::isinf(p)) return mag.maxCoeff();
  double acc = 0.0;
  for (int i = 0; i < mag.size(); ++i) acc += std::pow(mag(i), p);
  return std::pow(f.grid->cell_volume() * acc, 1.0 / p);
}

namespace {

// trapezoid weights over the sampled window
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    double half = 0.5 * (t[i + 1] - t[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

// cells of the ball around the origin cell, as coordinate offsets
std::vector<int> ball_offsets(const Grid& g, double radius) {
  return parabolic_ball(g, 0, radius);
}

// mean of `sq` over the ball centered at each cell, via the offset stencil
RealVector ball_means(const Grid& g, const RealVector& sq,
                      const std::vector<int>& offsets) {
  const int n = g.points_per_axis;
  RealVector out = RealVector::Zero(g.cells());
  for (int off : offsets) {
    auto oc = cell_coords(g, off);
    for (int i = 0; i < g.cells(); ++i) {
      auto c = cell_coords(g, i);
      out(i) += sq(flat_index(g, c[0] + oc[0], c[1] + oc[1]));
    }
  }
  return out / static_cast<double>(offsets.size());
}

struct WindowSlices {
  std::vector<std::size_t> index;
  std::vector<double> time;
};

WindowSlices slices_in(const SpaceTimeField& F, double lo, double hi,
                       bool lo_open = false) {
  WindowSlices w;
  for (std::size_t i = 0; i < F.times.size(); ++i) {
    double t = F.times[i];
    bool above = lo_open ? (t > lo) : (t >= lo);
    if (above && t <= hi) {
      w.index.push_back(i);
      w.time.push_back(t);
    }
  }
  return w;
}

}  // namespace

double tent_norm(const SpaceTimeField& F, double p, const NormConfig& cfg) {
  if (!(p >= 1.0)) throw std::invalid_argument("tent_norm: p must be >= 1");
  const Grid& g = *F.grid;

  if (std::isinf(p)) {
    // sup over balls B of (int_0^{r_B^2} avg_B |F|^2)^(1/2)
    double best = 0.0;
    for (double delta : cfg.delta_grid) {
      auto w = slices_in(F, cfg.t_min, std::min(delta, cfg.horizon));
      if (w.index.empty()) continue;
      auto weights = trapezoid_weights(w.time);
      auto offsets = ball_offsets(g, std::sqrt(delta));
      RealVector acc = RealVector::Zero(g.cells());
      for (std::size_t q = 0; q < w.index.size(); ++q)
        acc += weights[q] * ball_means(g, pointwise_sq(F.slices[w.index[q]]), offsets);
      best = std::max(best, acc.maxCoeff());
    }
    return std::sqrt(best);
  }

  auto w = slices_in(F, cfg.t_min, cfg.horizon);
  if (w.index.empty()) return 0.0;
  auto weights = trapezoid_weights(w.time);
  RealVector acc = RealVector::Zero(g.cells());
  for (std::size_t q = 0; q < w.index.size(); ++q) {
    auto offsets = ball_offsets(g, std::sqrt(w.time[q]));
    acc += weights[q] * ball_means(g, pointwise_sq(F.slices[w.index[q]]), offsets);
  }
  SpaceField s = zero_field(F.grid);
  s.values = acc.cwiseSqrt().cast<Complex>();
  return lebesgue_norm(s, p);
}

SpaceField kp_maximal(const SpaceTimeField& F, const NormConfig& cfg) {
  const Grid& g = *F.grid;
  if (cfg.delta_grid.empty())
    throw std::invalid_argument("kp_maximal: empty delta grid");
  RealVector best = RealVector::Zero(g.cells());
  for (double delta : cfg.delta_grid) {
    auto w = slices_in(F, delta / 2.0, delta, /*lo_open=*/true);
    if (w.index.empty())
      throw std::runtime_error("kp_maximal: no time slice in a delta window");
    auto offsets = ball_offsets(g, std::sqrt(delta));
    RealVector acc = RealVector::Zero(g.cells());
    for (std::size_t q = 0; q < w.index.size(); ++q)
      acc += ball_means(g, pointwise_sq(F.slices[w.index[q]]), offsets);
    acc /= static_cast<double>(w.index.size());
    best = best.cwiseMax(acc);
  }
  SpaceField out = zero_field(F.grid);
  out.values = best.cwiseSqrt().cast<Complex>();
  return out;
}

double xp_norm(const SpaceTimeField& F, double p, const NormConfig& cfg) {
  return lebesgue_norm(kp_maximal(F, cfg), p);
}

double slice_norm(const SpaceField& f, double p, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("slice_norm: delta <= 0");
  if (!(p >= 1.0)) throw std::invalid_argument("slice_norm: p must be >= 1");
  const Grid& g = *f.grid;
  auto offsets = ball_offsets(g, std::sqrt(delta));
  RealVector means = ball_means(g, pointwise_sq(f), offsets);
  if (std::isinf(p)) return std::sqrt(means.maxCoeff());
  double acc = 0.0;
  for (int i = 0; i < means.size(); ++i) acc += std::pow(means(i), p / 2.0);
  return std::pow(g.cell_volume() * acc, 1.0 / p);
}

SpaceField carleson_functional(const SpaceTimeField& F, const NormConfig& cfg) {
  const Grid& g = *F.grid;
  RealVector best = RealVector::Zero(g.cells());
  for (double delta : cfg.delta_grid) {
    auto w = slices_in(F, cfg.t_min, std::min(delta, cfg.horizon));
    if (w.index.empty()) continue;
    auto weights = trapezoid_weights(w.time);
    auto offsets = ball_offsets(g, std::sqrt(delta));
    RealVector energy = RealVector::Zero(g.cells());
    for (std::size_t q = 0; q < w.index.size(); ++q)
      energy += weights[q] * ball_means(g, pointwise_sq(F.slices[w.index[q]]), offsets);
    // scatter: every cell of B(center, sqrt(delta)) sees this ball
    for (int center = 0; center < g.cells(); ++center) {
      auto cc = cell_coords(g, center);
      for (int off : offsets) {
        auto oc = cell_coords(g, off);
        int y = flat_index(g, cc[0] + oc[0], cc[1] + oc[1]);
        best(y) = std::max(best(y), energy(center));
      }
    }
  }
  SpaceField out = zero_field(F.grid);
  out.values = best.cwiseSqrt().cast<Complex>();
  return out;
}

NormReport bochner_norms(const SpaceTimeField& u, const std::vector<double>& p_list) {
  if (u.times.size() < 2)
    throw std::invalid_argument("bochner_norms: need at least two time slices");
  NormReport r;
  r.provenance = "bochner";
  double linf_l2 = 0.0;
  for (const auto& s : u.slices) linf_l2 = std::max(linf_l2, l2_norm(s));
  r.set("linf_l2", linf_l2);
  for (double p : p_list) {
    double v = 0.0;
    for (const auto& s : u.slices) v = std::max(v, lebesgue_norm(s, p));
    r.set("linf_lp_" + std::to_string(p), v);
  }
  if (u.has_gradients()) {
    auto w = trapezoid_weights(u.times);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.times.size(); ++i) {
      double nrm = l2_norm(u.gradient_slices[i]);
      acc += w[i] * nrm * nrm;
    }
    r.set("grad_l2l2", std::sqrt(acc));
  }
  return r;
}

double gradient_symbol_sq(const Grid& g, int k0, int k1) {
  const int n = g.points_per_axis;
  const double h = g.spacing;
  auto sym = [&](int k) {
    double s = std::sin(M_PI * k / n);
    return 4.0 * s * s / (h * h);
  };
  double v = sym(((k0 % n) + n) % n);
  if (g.dim == 2) v += sym(((k1 % n) + n) % n);
  return v;
}

double hneg1_seminorm(const SpaceField& f) {
  if (f.arity != 1) throw std::invalid_argument("hneg1_seminorm: scalar fields only");
  const Grid& g = *f.grid;
  const int n = g.points_per_axis;
  const int N = g.cells();

  Vector values = f.values;
  values.array() -= values.mean();  // project out the mean

  // direct DFT; grids are small by construction
  double acc = 0.0;
  const double two_pi = 2.0 * M_PI;
  const int modes1 = g.dim == 2 ? n : 1;
  for (int k0 = 0; k0 < n; ++k0) {
    for (int k1 = 0; k1 < modes1; ++k1) {
      if (k0 == 0 && k1 == 0) continue;
      Complex c = 0.0;
      for (int i = 0; i < N; ++i) {
        auto x = cell_coords(g, i);
        double phase = two_pi * (static_cast<double>(k0) * x[0] +
                                 static_cast<double>(k1) * x[1]) / n;
        c += values(i) * Complex(std::cos(phase), -std::sin(phase));
      }
      acc += std::norm(c) / gradient_symbol_sq(g, k0, k1);
    }
  }
  return std::sqrt(g.cell_volume() / N * acc);
}

}  // namespace parlab
