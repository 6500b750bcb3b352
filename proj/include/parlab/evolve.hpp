#pragma once

#include "parlab/coeffs.hpp"
#include "parlab/grid.hpp"

#include <Eigen/SparseCore>

#include <map>
#include <memory>
#include <mutex>

namespace parlab {

/// Largest cell count for which dense matrices (expm, SVD, kernels) are built.
inline constexpr int kDenseLimit = 4096;

enum class SchemeKind { exact_expm, crank_nicolson, backward_euler };

struct Scheme {
  SchemeKind kind = SchemeKind::exact_expm;
  /// Substeps per semigroup factor; 0 selects ceil(tau / h^2) automatically.
  int substeps = 1;
};

Scheme parse_scheme(const std::string& kind, int substeps);
std::string scheme_name(SchemeKind kind);

/// Frozen-coefficient operator L = -div(A_k grad) for one time piece.
class DiscreteOperator {
 public:
  DiscreteOperator(GridPtr grid, Eigen::SparseMatrix<Complex> mat, int piece,
                   double certificate);

  const Grid& grid() const { return *grid_; }
  GridPtr grid_ptr() const { return grid_; }
  int piece_index() const { return piece_; }
  /// min over probe vectors of Re<Lu, u> / |grad u|^2
  double accretivity_certificate() const { return certificate_; }

  Vector apply(const Vector& u) const { return mat_ * u; }
  Vector apply_adjoint(const Vector& u) const { return mat_.adjoint() * u; }
  const Eigen::SparseMatrix<Complex>& sparse() const { return mat_; }
  Matrix dense() const;

 private:
  GridPtr grid_;
  Eigen::SparseMatrix<Complex> mat_;
  int piece_ = 0;
  double certificate_ = 0.0;
};

DiscreteOperator assemble_operator(const CoefficientField& A, int piece);

/// One approximate semigroup step u -> e^{-tau L} u.
SpaceField semigroup_step(const DiscreteOperator& L, double tau,
                          const SpaceField& u, const Scheme& scheme);

/// Dense spectral calculus for a frozen operator: L = V diag(mu) V^{-1}.
/// Used as the fast path for quadratures against e^{-tau L}.
class SpectralOperator {
 public:
  explicit SpectralOperator(const DiscreteOperator& op);

  const Eigen::VectorXcd& eigenvalues() const { return mu_; }
  Vector apply_exp(double tau, const Vector& v) const;
  Vector to_modes(const Vector& v) const { return lu_.solve(v); }
  Vector from_modes(const Vector& w) const { return V_ * w; }
  Matrix exp_dense(double tau) const;

 private:
  Matrix V_;
  Eigen::PartialPivLU<Matrix> lu_;
  Eigen::VectorXcd mu_;
};

/// The propagator family Gamma(t,s): ordered composition of frozen-coefficient
/// semigroup factors across the staircase pieces intersecting [s, t].
class Propagator {
 public:
  Propagator(std::shared_ptr<const CoefficientField> coeffs, Scheme scheme);

  const CoefficientField& coefficients() const { return *coeffs_; }
  std::shared_ptr<const CoefficientField> coefficients_ptr() const { return coeffs_; }
  const Scheme& scheme() const { return scheme_; }
  double horizon() const { return coeffs_->horizon(); }
  GridPtr grid() const { return coeffs_->grid; }
  const DiscreteOperator& piece_operator(int k) const { return ops_[k]; }

  SpaceField apply(double t, double s, const SpaceField& f) const;
  SpaceField adjoint_apply(double t, double s, const SpaceField& h) const;
  /// Dense Gamma(t,s); grids up to kDenseLimit cells only.
  Matrix dense(double t, double s) const;
  /// Column k(t,s,.,source_cell) of the kernel; requires t > s.
  SpaceField kernel_column(double t, double s, int source_cell) const;

  /// The (piece, duration) factors composing Gamma(t,s), earliest first.
  std::vector<std::pair<int, double>> factor_path(double t, double s) const;

 private:
  Matrix factor_dense(int piece, double tau, bool adjoint) const;

  std::shared_ptr<const CoefficientField> coeffs_;
  Scheme scheme_;
  std::vector<DiscreteOperator> ops_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::tuple<int, std::int64_t, bool>, std::shared_ptr<const Matrix>>
      factor_cache_;
};

Propagator build_propagator(std::shared_ptr<const CoefficientField> coeffs,
                            Scheme scheme = {});
Propagator build_propagator(const CoefficientField& coeffs, Scheme scheme = {});

/// Exact semidiscrete flow of a staircase field, evaluated spectrally.
/// Cheap at arbitrary times; used by quadrature-heavy checks.
class ExactFlow {
 public:
  explicit ExactFlow(std::shared_ptr<const CoefficientField> coeffs);

  const CoefficientField& coefficients() const { return *coeffs_; }
  Vector state(const Vector& u0, double t) const;
  SpaceField state(const SpaceField& u0, double t) const;
  SpaceTimeField sample(const SpaceField& u0, const std::vector<double>& times,
                        bool gradients) const;
  const SpectralOperator& piece_spectral(int k) const { return spec_[k]; }

 private:
  std::shared_ptr<const CoefficientField> coeffs_;
  std::vector<SpectralOperator> spec_;
};

/// Relative defect of the frozen-reference representation
///   Gamma(t,0)h = e^{-tL}h + int_0^t e^{-(t-s)L} div((A(s)-Aref) grad Gamma(s,0)h) ds
/// with L = -div(Aref grad). Composite midpoint panels split at the staircase
/// breakpoints and refined dyadically until successive estimates differ by
/// less than 1e-8 relative to |h|.
double duhamel_residual(const Propagator& P, const CoeffSample& reference,
                        const SpaceField& h, double t);

}  // namespace parlab
