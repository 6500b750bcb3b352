#pragma once

#include "parlab/grid.hpp"

#include <string>
#include <vector>

namespace parlab {

/// Discretization window for the space-time norms: time integrals run over
/// [t_min, horizon], the maximal-function supremum over the dyadic delta_grid.
struct NormConfig {
  double t_min = 0.0;
  double horizon = 1.0;
  std::vector<double> delta_grid;  // subset of (t_min, horizon], descending
};

/// delta_grid = {T * 2^-j, j = 0..levels}; t_min defaults to T * 2^-16.
NormConfig make_norm_config(double horizon, int delta_levels, double t_min = -1.0);

/// Geometric sample times, per_octave points per factor-of-two, descending
/// from the horizon down to floor (exclusive of 0); returned ascending.
std::vector<double> geometric_times(double horizon, double floor, int per_octave = 4);

struct NormReport {
  std::vector<std::pair<std::string, double>> values;
  std::string provenance;

  void set(const std::string& name, double v);
  double get(const std::string& name) const;
};

/// (h^dim sum |f|^p)^(1/p); max over cells for p = infinity.
double lebesgue_norm(const SpaceField& f, double p);

/// L^inf(L^2), the gradient L^2(L^2) (trapezoid over the sampled slices,
/// gradient slices required), and L^inf(L^p) for each requested p.
NormReport bochner_norms(const SpaceTimeField& u, const std::vector<double>& p_list);

/// Parabolic tent-space norm T^{p,2}: trapezoid over slices in [t_min, T] of
/// ball averages on B(x, sqrt(t)), then the L^p norm in x. For p = infinity,
/// the ball-supremum form sup_B (int_0^{r_B^2} avg_B |F|^2)^(1/2) over cell
/// centers and radii sqrt(delta), delta in the config grid.
double tent_norm(const SpaceTimeField& F, double p, const NormConfig& cfg);

/// Kenig-Pipher maximal function: per cell, the max over delta in the config
/// grid of the root-mean-square of |F|^2 over (delta/2, delta] x B(x, sqrt(delta)).
SpaceField kp_maximal(const SpaceTimeField& F, const NormConfig& cfg);

/// X^p norm: L^p norm of the Kenig-Pipher maximal function.
double xp_norm(const SpaceTimeField& F, double p, const NormConfig& cfg);

/// Slice-space norm E^p_delta.
double slice_norm(const SpaceField& g, double p, double delta);

/// Truncated Carleson functional: per cell y, the sup over balls containing y
/// (all cell centers, radii sqrt(delta)) of
/// (int_{t_min}^{min(r^2, T)} avg_B |F|^2 dt)^(1/2).
SpaceField carleson_functional(const SpaceTimeField& F, const NormConfig& cfg);

/// Homogeneous H^-1 seminorm, computed spectrally against the discrete
/// forward-difference symbol; the mean is projected out first.
double hneg1_seminorm(const SpaceField& f);

/// |sigma(k)|^2 for the discrete gradient, i.e. the eigenvalue of the
/// discrete Laplacian at integer frequency k (per axis).
double gradient_symbol_sq(const Grid& g, int k0, int k1 = 0);

}  // namespace parlab
