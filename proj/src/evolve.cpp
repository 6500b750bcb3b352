#include "parlab/evolve.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace parlab {

Scheme parse_scheme(const std::string& kind, int substeps) {
  Scheme s;
  s.substeps = substeps;
  if (kind == "exact_expm")
    s.kind = SchemeKind::exact_expm;
  else if (kind == "crank_nicolson")
    s.kind = SchemeKind::crank_nicolson;
  else if (kind == "backward_euler")
    s.kind = SchemeKind::backward_euler;
  else
    throw std::invalid_argument("unknown scheme '" + kind + "'");
  return s;
}

std::string scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::exact_expm: return "exact_expm";
    case SchemeKind::crank_nicolson: return "crank_nicolson";
    case SchemeKind::backward_euler: return "backward_euler";
  }
  return "?";
}

DiscreteOperator::DiscreteOperator(GridPtr grid, Eigen::SparseMatrix<Complex> mat,
                                   int piece, double certificate)
    : grid_(std::move(grid)), mat_(std::move(mat)), piece_(piece),
      certificate_(certificate) {}

Matrix DiscreteOperator::dense() const {
  if (grid_->cells() > kDenseLimit)
    throw std::runtime_error("DiscreteOperator::dense: grid too large");
  return Matrix(mat_);
}

DiscreteOperator assemble_operator(const CoefficientField& A, int piece) {
  if (piece < 0 || piece >= A.piece_count())
    throw std::invalid_argument("assemble_operator: bad piece index");
  const Grid& g = *A.grid;
  const int n = g.cells();
  const int d = g.dim;
  const double inv_h = 1.0 / g.spacing;

  // forward-difference gradient, (d*n) x n
  Eigen::SparseMatrix<Complex> G(static_cast<Eigen::Index>(d) * n, n);
  {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(2 * d * n);
    for (int c = 0; c < d; ++c)
      for (int i = 0; i < n; ++i) {
        trip.emplace_back(c * n + i, shifted_index(g, i, c, +1), inv_h);
        trip.emplace_back(c * n + i, i, -inv_h);
      }
    G.setFromTriplets(trip.begin(), trip.end());
  }

  // per-cell coefficient block acting on the gradient components
  Eigen::SparseMatrix<Complex> Ab(static_cast<Eigen::Index>(d) * n,
                                  static_cast<Eigen::Index>(d) * n);
  {
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(d * d * n);
    const auto& sample = A.pieces[piece];
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          Complex v = sample[i](r, c);
          if (v != Complex(0.0, 0.0)) trip.emplace_back(r * n + i, c * n + i, v);
        }
    Ab.setFromTriplets(trip.begin(), trip.end());
  }

  // L u = -div(A grad u) = G^H A G u; the discrete divergence is -G^H
  Eigen::SparseMatrix<Complex> L = G.adjoint() * Ab * G;
  L.makeCompressed();

  // accretivity probe: Re<Lu,u> / |grad u|^2 over seeded mean-zero vectors
  Rng rng(mix_seed(0xacc5eedull, "accretivity"));
  double cert = std::numeric_limits<double>::infinity();
  for (int p = 0; p < 16; ++p) {
    Vector u(n);
    for (int i = 0; i < n; ++i) u(i) = rng.complex_sym();
    u.array() -= u.mean();
    Vector Lu = L * u;
    Vector Gu = G * u;
    double denom = Gu.squaredNorm();
    if (denom > 0.0)
      cert = std::min(cert, (u.dot(Lu)).real() / denom);
  }
  if (cert < 0.0)
    throw std::runtime_error("assemble_operator: negative accretivity certificate");
  return DiscreteOperator(A.grid, std::move(L), piece, cert);
}

namespace {

// direct sparse solve with one step of iterative refinement; the contract is
// a relative residual below 1e-12
Vector solve_checked(const Eigen::SparseLU<Eigen::SparseMatrix<Complex>>& lu,
                     const Eigen::SparseMatrix<Complex>& M, const Vector& b) {
  Vector x = lu.solve(b);
  Vector r = b - M * x;
  double nb = b.norm();
  if (nb > 0.0 && r.norm() > 1e-13 * nb) x += lu.solve(r);
  r = b - M * x;
  if (nb > 0.0 && r.norm() > 1e-12 * nb)
    throw std::runtime_error("semigroup_step: linear solve residual above 1e-12");
  return x;
}

int auto_substeps(double tau, double h) {
  return std::max(1, static_cast<int>(std::ceil(tau / (h * h))));
}

Vector step_vector(const DiscreteOperator& L, double tau, Vector u,
                   const Scheme& scheme, bool adjoint) {
  if (tau < 0.0) throw std::invalid_argument("semigroup_step: tau < 0");
  if (tau == 0.0) return u;
  const int n = L.grid().cells();

  if (scheme.kind == SchemeKind::exact_expm) {
    if (n > kDenseLimit)
      throw std::runtime_error("semigroup_step: exact_expm needs <= 4096 cells");
    Matrix E = (-tau * (adjoint ? Matrix(L.dense().adjoint()) : L.dense())).exp();
    return E * u;
  }

  const int m = scheme.substeps > 0 ? scheme.substeps
                                    : auto_substeps(tau, L.grid().spacing);
  const double dt = tau / m;
  Eigen::SparseMatrix<Complex> A =
      adjoint ? Eigen::SparseMatrix<Complex>(L.sparse().adjoint()) : L.sparse();
  Eigen::SparseMatrix<Complex> I(n, n);
  I.setIdentity();

  if (scheme.kind == SchemeKind::crank_nicolson) {
    Eigen::SparseMatrix<Complex> Mp = I + (dt / 2.0) * A;
    Eigen::SparseMatrix<Complex> Mm = I - (dt / 2.0) * A;
    Mp.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(Mp);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("semigroup_step: factorization failed");
    for (int k = 0; k < m; ++k) u = solve_checked(lu, Mp, Vector(Mm * u));
    return u;
  }

  // backward Euler
  Eigen::SparseMatrix<Complex> Mp = I + dt * A;
  Mp.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(Mp);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("semigroup_step: factorization failed");
  for (int k = 0; k < m; ++k) u = solve_checked(lu, Mp, u);
  return u;
}

}  // namespace

SpaceField semigroup_step(const DiscreteOperator& L, double tau,
                          const SpaceField& u, const Scheme& scheme) {
  if (u.arity != 1) throw std::invalid_argument("semigroup_step: scalar fields only");
  SpaceField out = u;
  out.values = step_vector(L, tau, u.values, scheme, false);
  return out;
}

SpectralOperator::SpectralOperator(const DiscreteOperator& op) {
  Matrix L = op.dense();
  Eigen::ComplexEigenSolver<Matrix> es(L);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("SpectralOperator: eigendecomposition failed");
  V_ = es.eigenvectors();
  mu_ = es.eigenvalues();
  lu_.compute(V_);
  // reconstruction sanity: V diag(mu) V^{-1} must reproduce L
  Matrix R = V_ * mu_.asDiagonal() * lu_.solve(Matrix::Identity(L.rows(), L.cols()));
  double rel = (R - L).norm() / std::max(1.0, L.norm());
  if (rel > 1e-8)
    throw std::runtime_error("SpectralOperator: ill-conditioned eigenbasis");
}

Vector SpectralOperator::apply_exp(double tau, const Vector& v) const {
  Vector w = lu_.solve(v);
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) *= std::exp(-tau * mu_(i));
  return V_ * w;
}

Matrix SpectralOperator::exp_dense(double tau) const {
  Matrix W = lu_.solve(Matrix::Identity(V_.rows(), V_.cols()));
  for (Eigen::Index i = 0; i < mu_.size(); ++i)
    W.row(i) *= std::exp(-tau * mu_(i));
  return V_ * W;
}

Propagator::Propagator(std::shared_ptr<const CoefficientField> coeffs, Scheme scheme)
    : coeffs_(std::move(coeffs)), scheme_(scheme) {
  ops_.reserve(coeffs_->piece_count());
  for (int k = 0; k < coeffs_->piece_count(); ++k)
    ops_.push_back(assemble_operator(*coeffs_, k));
}

Propagator build_propagator(std::shared_ptr<const CoefficientField> coeffs,
                            Scheme scheme) {
  return Propagator(std::move(coeffs), scheme);
}

Propagator build_propagator(const CoefficientField& coeffs, Scheme scheme) {
  return Propagator(std::make_shared<CoefficientField>(coeffs), scheme);
}

std::vector<std::pair<int, double>> Propagator::factor_path(double t, double s) const {
  const double T = horizon();
  if (!(0.0 <= s && s <= t && t <= T * (1.0 + 1e-12)))
    throw std::invalid_argument("propagator: need 0 <= s <= t <= T");
  t = std::min(t, T);
  std::vector<std::pair<int, double>> path;
  const auto& bp = coeffs_->breakpoints;
  for (int k = 0; k < coeffs_->piece_count(); ++k) {
    double lo = std::max(s, bp[k]);
    double hi = std::min(t, bp[k + 1]);
    if (hi > lo) path.emplace_back(k, hi - lo);
  }
  return path;
}

Matrix Propagator::factor_dense(int piece, double tau, bool adjoint) const {
  const int n = grid()->cells();
  if (n > kDenseLimit)
    throw std::runtime_error("propagator: dense factors need <= 4096 cells");
  std::int64_t bits;
  static_assert(sizeof(bits) == sizeof(tau));
  std::memcpy(&bits, &tau, sizeof(bits));
  const auto key = std::make_tuple(piece, bits, adjoint);
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = factor_cache_.find(key);
    if (it != factor_cache_.end()) return *it->second;
  }
  Matrix F;
  const DiscreteOperator& L = ops_[piece];
  if (scheme_.kind == SchemeKind::exact_expm) {
    Matrix Ld = L.dense();
    if (adjoint) Ld = Ld.adjoint().eval();
    F = (-tau * Ld).exp();
  } else {
    // column-by-column application of the stepping scheme
    F.resize(n, n);
    for (int j = 0; j < n; ++j) {
      Vector e = Vector::Zero(n);
      e(j) = 1.0;
      F.col(j) = step_vector(L, tau, e, scheme_, adjoint);
    }
  }
  auto stored = std::make_shared<const Matrix>(std::move(F));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  factor_cache_.emplace(key, stored);
  return *stored;
}

SpaceField Propagator::apply(double t, double s, const SpaceField& f) const {
  if (f.arity != 1) throw std::invalid_argument("propagator: scalar fields only");
  auto path = factor_path(t, s);
  SpaceField out = f;
  const int n = grid()->cells();
  for (auto [k, tau] : path) {
    if (n <= kDenseLimit && scheme_.kind == SchemeKind::exact_expm)
      out.values = factor_dense(k, tau, false) * out.values;
    else
      out.values = step_vector(ops_[k], tau, out.values, scheme_, false);
  }
  return out;
}

SpaceField Propagator::adjoint_apply(double t, double s, const SpaceField& h) const {
  if (h.arity != 1) throw std::invalid_argument("propagator: scalar fields only");
  auto path = factor_path(t, s);
  SpaceField out = h;
  const int n = grid()->cells();
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    auto [k, tau] = *it;
    if (n <= kDenseLimit && scheme_.kind == SchemeKind::exact_expm)
      out.values = factor_dense(k, tau, true) * out.values;
    else
      out.values = step_vector(ops_[k], tau, out.values, scheme_, true);
  }
  return out;
}

Matrix Propagator::dense(double t, double s) const {
  const int n = grid()->cells();
  if (n > kDenseLimit)
    throw std::runtime_error("propagator: dense form needs <= 4096 cells");
  auto path = factor_path(t, s);
  Matrix M = Matrix::Identity(n, n);
  for (auto [k, tau] : path) M = factor_dense(k, tau, false) * M;
  return M;
}

SpaceField Propagator::kernel_column(double t, double s, int source_cell) const {
  if (!(t > s))
    throw std::invalid_argument("kernel_column: requires t > s");
  return apply(t, s, delta_field(grid(), source_cell));
}

ExactFlow::ExactFlow(std::shared_ptr<const CoefficientField> coeffs)
    : coeffs_(std::move(coeffs)) {
  spec_.reserve(coeffs_->piece_count());
  for (int k = 0; k < coeffs_->piece_count(); ++k)
    spec_.emplace_back(assemble_operator(*coeffs_, k));
}

Vector ExactFlow::state(const Vector& u0, double t) const {
  const auto& bp = coeffs_->breakpoints;
  if (!(t >= 0.0 && t <= coeffs_->horizon() * (1.0 + 1e-12)))
    throw std::invalid_argument("ExactFlow: time outside [0, T]");
  Vector u = u0;
  for (int k = 0; k < coeffs_->piece_count(); ++k) {
    double lo = bp[k];
    double hi = std::min(t, bp[k + 1]);
    if (hi <= lo) break;
    u = spec_[k].apply_exp(hi - lo, u);
  }
  return u;
}

SpaceField ExactFlow::state(const SpaceField& u0, double t) const {
  SpaceField out = u0;
  out.values = state(u0.values, t);
  return out;
}

SpaceTimeField ExactFlow::sample(const SpaceField& u0,
                                 const std::vector<double>& times,
                                 bool gradients) const {
  std::vector<SpaceField> slices;
  slices.reserve(times.size());
  Vector u = u0.values;
  double prev = 0.0;
  const auto& bp = coeffs_->breakpoints;
  for (double t : times) {
    // advance piecewise from prev to t
    for (int k = 0; k < coeffs_->piece_count(); ++k) {
      double lo = std::max(prev, bp[k]);
      double hi = std::min(t, bp[k + 1]);
      if (hi > lo) u = spec_[k].apply_exp(hi - lo, u);
    }
    prev = t;
    slices.push_back(make_field(coeffs_->grid, u));
  }
  auto f = make_space_time_field(coeffs_->grid, times, std::move(slices));
  return gradients ? with_gradients(std::move(f)) : f;
}

double duhamel_residual(const Propagator& P, const CoeffSample& reference,
                        const SpaceField& h, double t) {
  const auto& A = P.coefficients();
  const Grid& g = *A.grid;
  if (!(t > 0.0 && t <= A.horizon() * (1.0 + 1e-12)))
    throw std::invalid_argument("duhamel_residual: t outside (0, T]");

  // frozen reference operator and its spectral calculus
  CoefficientField ref;
  ref.grid = A.grid;
  ref.breakpoints = {0.0, A.horizon()};
  ref.pieces = {reference};
  ref.bv = 0.0;
  ref.ellipticity = check_ellipticity(ref);
  SpectralOperator Lref(assemble_operator(ref, 0));

  ExactFlow flow(P.coefficients_ptr());

  const double hnorm = l2_norm(h);
  if (hnorm == 0.0) return 0.0;

  // panel boundaries: staircase breakpoints inside (0, t)
  std::vector<double> edges{0.0};
  for (double b : A.breakpoints)
    if (b > 0.0 && b < t) edges.push_back(b);
  edges.push_back(t);

  auto integrand = [&](double s) -> Vector {
    Vector u = flow.state(h.values, s);
    SpaceField grad = discrete_gradient(make_field(A.grid, u));
    const auto& piece = A.pieces[A.piece_at(s)];
    SpaceField v = zero_field(A.grid, g.dim);
    const int n = g.cells();
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2cd gv = Eigen::Vector2cd::Zero();
      for (int c = 0; c < g.dim; ++c) gv(c) = grad.values(c * n + i);
      Eigen::Matrix2cd D = piece[i] - reference[i];
      Eigen::Vector2cd w = D * gv;
      for (int c = 0; c < g.dim; ++c) v.values(c * n + i) = w(c);
    }
    Vector divv = discrete_divergence(v).values;
    return Lref.apply_exp(t - s, divv);
  };

  auto estimate = [&](int level) -> Vector {
    Vector acc = Vector::Zero(g.cells());
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double a = edges[e], b = edges[e + 1];
      const int m = 1 << level;
      const double w = (b - a) / m;
      for (int j = 0; j < m; ++j) acc += w * integrand(a + (j + 0.5) * w);
    }
    return acc;
  };

  Vector base = Lref.apply_exp(t, h.values);
  Vector lhs = P.apply(t, 0.0, h).values;

  Vector prev = estimate(3);
  for (int level = 4; level <= 14; ++level) {
    Vector cur = estimate(level);
    double diff = std::sqrt(g.cell_volume()) * (cur - prev).norm();
    prev = cur;
    if (diff < 1e-8 * hnorm) {
      double res = std::sqrt(g.cell_volume()) * (lhs - base - cur).norm();
      return res / hnorm;
    }
  }
  throw std::runtime_error("duhamel_residual: quadrature stagnation");
}

}  // namespace parlab
