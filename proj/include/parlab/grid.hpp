#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace parlab {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Periodic torus discretization of R^d, d in {1,2}.
/// Cells are ordered row-major; the center of the cell with multi-index
/// (m0, m1) sits at (m0*spacing, m1*spacing).
struct Grid {
  int dim = 1;
  int points_per_axis = 4;
  double period = 1.0;
  double spacing = 0.25;  // period / points_per_axis, stored as derived

  int cells() const {
    int c = points_per_axis;
    for (int k = 1; k < dim; ++k) c *= points_per_axis;
    return c;
  }
  double cell_volume() const {
    double v = spacing;
    for (int k = 1; k < dim; ++k) v *= spacing;
    return v;
  }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(int dim, int points_per_axis, double period);

std::array<int, 2> cell_coords(const Grid& g, int flat);
int flat_index(const Grid& g, int i0, int i1 = 0);
/// Flat index of the cell shifted by `step` cells along `axis`, with wrap.
int shifted_index(const Grid& g, int flat, int axis, int step);
/// Wrapped Euclidean distance between two cell centers.
double wrapped_distance(const Grid& g, int a, int b);
/// Smallest wrapped distance between cells of E and cells of F.
double wrapped_set_distance(const Grid& g, const std::vector<int>& E,
                            const std::vector<int>& F);

/// Complex field sampled per cell. arity == 1 for scalars; arity == dim for
/// gradient-type fields, stored as arity contiguous blocks of cells() values.
struct SpaceField {
  GridPtr grid;
  int arity = 1;
  Vector values;

  auto component(int c) { return values.segment(c * grid->cells(), grid->cells()); }
  auto component(int c) const {
    return values.segment(c * grid->cells(), grid->cells());
  }
};

SpaceField make_field(GridPtr g, Vector values, int arity = 1);
SpaceField zero_field(GridPtr g, int arity = 1);
SpaceField constant_field(GridPtr g, Complex value);
/// Discrete delta at `cell`: value 1/h^dim there, 0 elsewhere.
SpaceField delta_field(GridPtr g, int cell);

/// Cell-sum inner product scaled by h^dim, antilinear in the first slot.
Complex inner(const SpaceField& a, const SpaceField& b);
double l2_norm(const SpaceField& a);
/// Per-cell squared magnitude, summed over components for vector fields.
RealVector pointwise_sq(const SpaceField& a);

/// Forward difference with periodic wrap: component j at cell i equals
/// (u(i+e_j) - u(i)) / h.
SpaceField discrete_gradient(const SpaceField& u);
/// Exact negative adjoint of discrete_gradient:
/// <Gu, F> = -<u, div F> for all u, F.
SpaceField discrete_divergence(const SpaceField& F);

/// Cells whose centers lie at wrapped distance < radius from the center of
/// center_cell. Always contains center_cell. Sorted ascending.
std::vector<int> parabolic_ball(const Grid& g, int center_cell, double radius);

/// Sampled space-time field u(t,x) with optional gradient samples.
struct SpaceTimeField {
  GridPtr grid;
  std::vector<double> times;  // strictly increasing, in (0,T]
  std::vector<SpaceField> slices;
  std::vector<SpaceField> gradient_slices;  // empty when absent

  bool has_gradients() const { return !gradient_slices.empty(); }
};

SpaceTimeField make_space_time_field(GridPtr g, std::vector<double> times,
                                     std::vector<SpaceField> slices);
/// Returns a copy with gradient_slices filled in via discrete_gradient.
SpaceTimeField with_gradients(SpaceTimeField f);

/// Deterministic RNG helpers (raw bit streams, no distribution objects).
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next();
  double uniform();             // [0, 1)
  double uniform_sym();         // [-1, 1)
  Complex complex_sym();        // re, im in [-1, 1)
  int index(int n);             // [0, n)
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag);

/// Random complex field with entries uniform in the unit square.
SpaceField random_field(GridPtr g, Rng& rng, int arity = 1);
/// Same, projected to zero mean per component.
SpaceField random_mean_zero_field(GridPtr g, Rng& rng);
Complex mean_value(const SpaceField& u);

}  // namespace parlab
