#include "parlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace parlab {

GridPtr build_grid(int dim, int points_per_axis, double period) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("build_grid: dim must be 1 or 2, got " +
                                std::to_string(dim));
  if (points_per_axis < 4)
    throw std::invalid_argument("build_grid: points_per_axis must be >= 4");
  if (!(period > 0.0))
    throw std::invalid_argument("build_grid: period must be positive");
  auto g = std::make_shared<Grid>();
  g->dim = dim;
  g->points_per_axis = points_per_axis;
  g->period = period;
  g->spacing = period / points_per_axis;
  return g;
}

std::array<int, 2> cell_coords(const Grid& g, int flat) {
  if (g.dim == 1) return {flat, 0};
  return {flat / g.points_per_axis, flat % g.points_per_axis};
}

int flat_index(const Grid& g, int i0, int i1) {
  const int n = g.points_per_axis;
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  if (g.dim == 1) return wrap(i0);
  return wrap(i0) * n + wrap(i1);
}

int shifted_index(const Grid& g, int flat, int axis, int step) {
  auto c = cell_coords(g, flat);
  c[axis] += step;
  return flat_index(g, c[0], c[1]);
}

namespace {
double axis_gap(const Grid& g, int a, int b) {
  double d = std::abs(a - b) * g.spacing;
  return std::min(d, g.period - d);
}
}  // namespace

double wrapped_distance(const Grid& g, int a, int b) {
  auto ca = cell_coords(g, a);
  auto cb = cell_coords(g, b);
  double s = 0.0;
  for (int k = 0; k < g.dim; ++k) {
    double d = axis_gap(g, ca[k], cb[k]);
    s += d * d;
  }
  return std::sqrt(s);
}

double wrapped_set_distance(const Grid& g, const std::vector<int>& E,
                            const std::vector<int>& F) {
  double best = std::numeric_limits<double>::infinity();
  for (int e : E)
    for (int f : F) best = std::min(best, wrapped_distance(g, e, f));
  return best;
}

SpaceField make_field(GridPtr g, Vector values, int arity) {
  if (values.size() != static_cast<Eigen::Index>(g->cells()) * arity)
    throw std::invalid_argument("make_field: value count != cells * arity");
  return SpaceField{std::move(g), arity, std::move(values)};
}

SpaceField zero_field(GridPtr g, int arity) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(g->cells()) * arity);
  return SpaceField{std::move(g), arity, std::move(v)};
}

SpaceField constant_field(GridPtr g, Complex value) {
  Vector v = Vector::Constant(g->cells(), value);
  return SpaceField{std::move(g), 1, std::move(v)};
}

SpaceField delta_field(GridPtr g, int cell) {
  Vector v = Vector::Zero(g->cells());
  v(cell) = 1.0 / g->cell_volume();
  return SpaceField{std::move(g), 1, std::move(v)};
}

Complex inner(const SpaceField& a, const SpaceField& b) {
  if (a.arity != b.arity || a.values.size() != b.values.size())
    throw std::invalid_argument("inner: field shape mismatch");
  return a.grid->cell_volume() * a.values.dot(b.values);
}

double l2_norm(const SpaceField& a) {
  return std::sqrt(a.grid->cell_volume()) * a.values.norm();
}

RealVector pointwise_sq(const SpaceField& a) {
  const int n = a.grid->cells();
  RealVector out = RealVector::Zero(n);
  for (int c = 0; c < a.arity; ++c)
    out += a.component(c).cwiseAbs2();
  return out;
}

SpaceField discrete_gradient(const SpaceField& u) {
  if (u.arity != 1)
    throw std::invalid_argument("discrete_gradient: expects a scalar field");
  const Grid& g = *u.grid;
  const int n = g.cells();
  const double inv_h = 1.0 / g.spacing;
  SpaceField out = zero_field(u.grid, g.dim);
  for (int c = 0; c < g.dim; ++c) {
    auto comp = out.values.segment(c * n, n);
    for (int i = 0; i < n; ++i)
      comp(i) = (u.values(shifted_index(g, i, c, +1)) - u.values(i)) * inv_h;
  }
  return out;
}

SpaceField discrete_divergence(const SpaceField& F) {
  const Grid& g = *F.grid;
  if (F.arity != g.dim)
    throw std::invalid_argument("discrete_divergence: arity != dim");
  const int n = g.cells();
  const double inv_h = 1.0 / g.spacing;
  SpaceField out = zero_field(F.grid, 1);
  for (int c = 0; c < g.dim; ++c) {
    auto comp = F.values.segment(c * n, n);
    for (int i = 0; i < n; ++i)
      out.values(i) += (comp(i) - comp(shifted_index(g, i, c, -1))) * inv_h;
  }
  return out;
}

std::vector<int> parabolic_ball(const Grid& g, int center_cell, double radius) {
  std::vector<int> out;
  for (int i = 0; i < g.cells(); ++i)
    if (wrapped_distance(g, center_cell, i) < radius) out.push_back(i);
  if (out.empty()) out.push_back(center_cell);
  return out;
}

SpaceTimeField make_space_time_field(GridPtr g, std::vector<double> times,
                                     std::vector<SpaceField> slices) {
  if (times.size() != slices.size())
    throw std::invalid_argument("space-time field: times/slices mismatch");
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    if (!(times[k] < times[k + 1]))
      throw std::invalid_argument("space-time field: times not increasing");
  if (!times.empty() && !(times.front() > 0.0))
    throw std::invalid_argument("space-time field: times must be positive");
  return SpaceTimeField{std::move(g), std::move(times), std::move(slices), {}};
}

SpaceTimeField with_gradients(SpaceTimeField f) {
  f.gradient_slices.clear();
  f.gradient_slices.reserve(f.slices.size());
  for (const auto& s : f.slices) f.gradient_slices.push_back(discrete_gradient(s));
  return f;
}

std::uint64_t Rng::next() {
  // splitmix64
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
double Rng::uniform_sym() { return 2.0 * uniform() - 1.0; }
Complex Rng::complex_sym() { return {uniform_sym(), uniform_sym()}; }
int Rng::index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 1469598103934665603ull ^ seed;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

SpaceField random_field(GridPtr g, Rng& rng, int arity) {
  SpaceField f = zero_field(g, arity);
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    f.values(i) = rng.complex_sym();
  return f;
}

SpaceField random_mean_zero_field(GridPtr g, Rng& rng) {
  SpaceField f = random_field(std::move(g), rng, 1);
  f.values.array() -= f.values.mean();
  return f;
}

Complex mean_value(const SpaceField& u) { return u.values.mean(); }

}  // namespace parlab
