#include "parlab/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace parlab {

EllipticityConstants EllipticityConstants::derive(double lambda, double Lambda,
                                                  int dim) {
  EllipticityConstants e;
  e.lambda = lambda;
  e.Lambda = Lambda;
  e.alpha = lambda / (4.0 * Lambda * Lambda);
  e.rh_exponent = 2.0 + 4.0 / dim;
  return e;
}

int CoefficientField::piece_at(double t) const {
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12))
    throw std::invalid_argument("piece_at: time outside [0, T]");
  // last piece owns t == T
  int lo = 0, hi = piece_count() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (t >= breakpoints[mid])
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

namespace {

double op_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

double min_hermitian_eig(const Eigen::MatrixXcd& m) {
  if (m.rows() == 1) return m(0, 0).real();
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return es.eigenvalues()(0);
}

CoeffSample scalar_sample(const Grid& g, const std::vector<Complex>& a) {
  CoeffSample s(g.cells(), Eigen::Matrix2cd::Zero());
  for (int i = 0; i < g.cells(); ++i)
    for (int c = 0; c < g.dim; ++c) s[i](c, c) = a[i];
  return s;
}

CoeffSample uniform_scalar_sample(const Grid& g, Complex a) {
  return scalar_sample(g, std::vector<Complex>(g.cells(), a));
}

CoefficientField finalize(GridPtr grid, std::vector<double> breakpoints,
                          std::vector<CoeffSample> pieces) {
  CoefficientField A;
  A.grid = std::move(grid);
  A.breakpoints = std::move(breakpoints);
  A.pieces = std::move(pieces);
  A.bv = bv_seminorm(*A.grid, A.pieces);
  A.ellipticity = check_ellipticity(A);
  return A;
}

}  // namespace

double bv_seminorm(const Grid& g, const std::vector<CoeffSample>& pieces) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
    double sup = 0.0;
    for (int i = 0; i < g.cells(); ++i) {
      Eigen::MatrixXcd d = (pieces[k + 1][i] - pieces[k][i]).topLeftCorner(g.dim, g.dim);
      sup = std::max(sup, op_norm(d));
    }
    total += sup;
  }
  return total;
}

EllipticityConstants check_ellipticity(const CoefficientField& A) {
  const Grid& g = *A.grid;
  double lambda = std::numeric_limits<double>::infinity();
  double Lambda = 0.0;
  for (const auto& piece : A.pieces) {
    for (int i = 0; i < g.cells(); ++i) {
      Eigen::MatrixXcd m = piece[i].topLeftCorner(g.dim, g.dim);
      lambda = std::min(lambda, min_hermitian_eig(m));
      Lambda = std::max(Lambda, op_norm(m));
    }
  }
  if (!(lambda > 0.0))
    throw std::runtime_error("check_ellipticity: field is not elliptic (lambda <= 0)");
  return EllipticityConstants::derive(lambda, Lambda, g.dim);
}

CoefficientField make_scenario(const std::string& name, GridPtr grid,
                               const nlohmann::json& params, double horizon,
                               std::uint64_t seed) {
  if (!(horizon > 0.0)) throw std::invalid_argument("make_scenario: horizon <= 0");
  const Grid& g = *grid;

  if (name == "heat") {
    return finalize(grid, {0.0, horizon}, {uniform_scalar_sample(g, 1.0)});
  }

  if (name == "real_checkerboard") {
    const double lo = params.value("lo", 0.5);
    const double hi = params.value("hi", 2.0);
    if (!(lo > 0.0 && hi >= lo))
      throw std::invalid_argument("real_checkerboard: need 0 < lo <= hi");
    std::vector<Complex> a(g.cells());
    for (int i = 0; i < g.cells(); ++i) {
      auto c = cell_coords(g, i);
      a[i] = ((c[0] + c[1]) % 2 == 0) ? lo : hi;
    }
    return finalize(grid, {0.0, horizon}, {scalar_sample(g, a)});
  }

  if (name == "complex_perturb") {
    const double eps = params.value("epsilon", 0.05);
    if (!(eps >= 0.0 && eps < 1.0))
      throw std::invalid_argument("complex_perturb: epsilon must be in [0, 1)");
    const int pieces = params.value("pieces", 1);
    Rng rng(mix_seed(seed, "complex_perturb"));
    std::vector<double> bp(pieces + 1);
    for (int k = 0; k <= pieces; ++k) bp[k] = horizon * k / pieces;
    std::vector<CoeffSample> samples;
    for (int k = 0; k < pieces; ++k) {
      std::vector<Complex> a(g.cells());
      for (int i = 0; i < g.cells(); ++i) {
        Complex b = rng.complex_sym();
        if (std::abs(b) > 1.0) b /= std::abs(b);
        a[i] = 1.0 + eps * b;
      }
      samples.push_back(scalar_sample(g, a));
    }
    return finalize(grid, bp, samples);
  }

  if (name == "bv_staircase") {
    std::vector<double> jumps;
    if (params.contains("jumps")) {
      jumps = params["jumps"].get<std::vector<double>>();
    } else {
      const double budget = params.value("budget", 0.5);
      const int K = params.value("K", 4);
      if (K < 0) throw std::invalid_argument("bv_staircase: K < 0");
      jumps.assign(K, K > 0 ? budget / K : 0.0);
    }
    const std::string style = params.value("style", "complex_rotation");
    const int K = static_cast<int>(jumps.size());
    std::vector<double> bp(K + 2);
    for (int k = 0; k <= K + 1; ++k) bp[k] = horizon * k / (K + 1);
    std::vector<CoeffSample> samples;
    Complex a = 1.0;
    samples.push_back(uniform_scalar_sample(g, a));
    for (int k = 0; k < K; ++k) {
      // alternate around 1 so the walk stays elliptic for any jump list
      Complex dir = (style == "real") ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
      a += ((k % 2 == 0) ? 1.0 : -1.0) * jumps[k] * dir;
      samples.push_back(uniform_scalar_sample(g, a));
    }
    return finalize(grid, bp, samples);
  }

  if (name == "time_oscillating") {
    const double amplitude = params.value("amplitude", 0.4);
    const int level = params.value("level", 4);
    if (!(amplitude >= 0.0 && amplitude < 1.0))
      throw std::invalid_argument("time_oscillating: amplitude must be in [0, 1)");
    auto gp = grid;
    const double T = horizon;
    TimeCoefficientFn fn = [gp, amplitude, T](double t) {
      const Grid& gg = *gp;
      std::vector<Complex> a(gg.cells());
      for (int i = 0; i < gg.cells(); ++i) {
        auto c = cell_coords(gg, i);
        double x = c[0] * gg.spacing;
        double s = std::cos(2.0 * M_PI * x / gg.period);
        a[i] = 1.0 + amplitude * std::sin(2.0 * M_PI * t / T) * s;
      }
      return scalar_sample(gg, a);
    };
    return time_average_refine(fn, grid, level, horizon);
  }

  throw std::invalid_argument("make_scenario: unknown scenario '" + name + "'");
}

namespace {

// adaptive Simpson on sample vectors, absolute tolerance per matrix entry
CoeffSample average_recursive(const TimeCoefficientFn& fn, double a, double b,
                              const CoeffSample& fa, const CoeffSample& fm,
                              const CoeffSample& fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  auto fl = fn(0.5 * (a + m));
  auto fr = fn(0.5 * (m + b));
  const std::size_t n = fa.size();
  CoeffSample coarse(n), fine(n);
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    coarse[i] = (fa[i] + 4.0 * fm[i] + fb[i]) / 6.0;
    fine[i] = (fa[i] + 4.0 * fl[i] + 2.0 * fm[i] + 4.0 * fr[i] + fb[i]) / 12.0;
    err = std::max(err, (fine[i] - coarse[i]).cwiseAbs().maxCoeff());
  }
  if (err < tol || depth >= 24) {
    if (depth >= 24 && err >= tol)
      throw std::runtime_error("time_average_refine: quadrature non-convergence");
    return fine;
  }
  auto left = average_recursive(fn, a, m, fa, fl, fm, 0.5 * tol, depth + 1);
  auto right = average_recursive(fn, m, b, fm, fr, fb, 0.5 * tol, depth + 1);
  CoeffSample out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (left[i] + right[i]);
  return out;
}

}  // namespace

CoefficientField time_average_refine(const TimeCoefficientFn& spec, GridPtr grid,
                                     int level, double horizon) {
  if (level < 0) throw std::invalid_argument("time_average_refine: level < 0");
  const int m = 1 << level;
  std::vector<double> bp(m + 1);
  for (int k = 0; k <= m; ++k) bp[k] = horizon * k / m;
  std::vector<CoeffSample> pieces;
  pieces.reserve(m);
  for (int k = 0; k < m; ++k) {
    // endpoints nudged inward: pieces are left-continuous on [t_k, t_{k+1})
    const double eps = 1e-12 * (bp[k + 1] - bp[k]);
    const double a = bp[k] + eps, b = bp[k + 1] - eps;
    auto fa = spec(a);
    auto fm = spec(0.5 * (a + b));
    auto fb = spec(b);
    pieces.push_back(average_recursive(spec, a, b, fa, fm, fb, 1e-10, 0));
  }
  CoefficientField A;
  A.grid = std::move(grid);
  A.breakpoints = std::move(bp);
  A.pieces = std::move(pieces);
  A.bv = bv_seminorm(*A.grid, A.pieces);
  A.ellipticity = check_ellipticity(A);
  return A;
}

CoefficientField extended_to(const CoefficientField& A, double new_horizon) {
  if (new_horizon <= A.horizon()) return A;
  CoefficientField out = A;
  out.breakpoints.back() = new_horizon;
  return out;
}

CoefficientField reversed_adjoint(const CoefficientField& A, double s, double t) {
  if (!(0.0 <= s && s <= t && t <= A.horizon() * (1.0 + 1e-12)))
    throw std::invalid_argument("reversed_adjoint: need 0 <= s <= t <= T");
  // collect the breakpoints falling strictly inside (s, t)
  std::vector<double> inner;
  for (double b : A.breakpoints)
    if (b > s && b < t) inner.push_back(b);
  std::vector<double> bp;
  bp.push_back(0.0);
  for (auto it = inner.rbegin(); it != inner.rend(); ++it) bp.push_back(t - *it);
  bp.push_back(t - s);
  std::vector<CoeffSample> pieces;
  // piece j of the reversed field covers sigma in [bp[j], bp[j+1]), i.e.
  // original time t - sigma, conjugate-transposed
  for (std::size_t j = 0; j + 1 < bp.size(); ++j) {
    double sigma_mid = 0.5 * (bp[j] + bp[j + 1]);
    int k = A.piece_at(t - sigma_mid);
    CoeffSample sample(A.grid->cells());
    for (int i = 0; i < A.grid->cells(); ++i)
      sample[i] = A.pieces[k][i].adjoint();
    pieces.push_back(std::move(sample));
  }
  if (pieces.empty()) {
    // s == t: degenerate single piece
    bp = {0.0, std::max(t - s, 1e-300)};
    CoeffSample sample(A.grid->cells());
    int k = A.piece_at(s);
    for (int i = 0; i < A.grid->cells(); ++i) sample[i] = A.pieces[k][i].adjoint();
    pieces.push_back(std::move(sample));
  }
  CoefficientField out;
  out.grid = A.grid;
  out.breakpoints = std::move(bp);
  out.pieces = std::move(pieces);
  out.bv = bv_seminorm(*out.grid, out.pieces);
  out.ellipticity = check_ellipticity(out);
  return out;
}

}  // namespace parlab
