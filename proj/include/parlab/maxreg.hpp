#pragma once

#include "parlab/evolve.hpp"
#include "parlab/grid.hpp"

#include <functional>

namespace parlab {

struct QuadratureConfig {
  double abs_tol = 1e-9;
  int max_levels = 24;
};

/// Frozen-coefficient operator with its spectral calculus and quadrature
/// settings, the common backbone of the causal singular integrals below.
class AutonomousKit {
 public:
  AutonomousKit(const CoefficientField& A, int piece = 0, QuadratureConfig q = {});

  const DiscreteOperator& op() const { return op_; }
  const SpectralOperator& spectral() const { return spec_; }
  const QuadratureConfig& quadrature() const { return quad_; }
  GridPtr grid() const { return op_.grid_ptr(); }

 private:
  DiscreteOperator op_;
  SpectralOperator spec_;
  QuadratureConfig quad_;
};

/// M_L f(t) = int_0^t L e^{-(t-s)L} f(s) ds on uniformly sampled slices.
/// Panels contribute (e^{-tau_lo L} - e^{-tau_hi L}) f_panel exactly, which is
/// the closed-form integral of L e^{-tau L} against a per-panel-constant f.
SpaceTimeField apply_ML(const AutonomousKit& kit, const SpaceTimeField& f);

/// MtildeL f(t) = int_0^t grad e^{-(t-s)L} div f(s) ds, same panel scheme with
/// the grid module's gradient/divergence wrappers.
SpaceTimeField apply_ML_tilde(const AutonomousKit& kit, const SpaceTimeField& f);

/// R_L f(t) = int_0^t e^{-(t-s)L} div f(s) ds.
SpaceTimeField apply_RL(const AutonomousKit& kit, const SpaceTimeField& f);

using SpaceTimeOperator = std::function<SpaceTimeField(const SpaceTimeField&)>;
using SpaceTimeNorm = std::function<double(const SpaceTimeField&)>;

/// Lower bound on the operator norm: max over probes (>= 16, normalized in
/// the source norm) of target_norm(op(f)).
double estimate_operator_norm(const SpaceTimeOperator& op,
                              const SpaceTimeNorm& source_norm,
                              const SpaceTimeNorm& target_norm,
                              const std::vector<SpaceTimeField>& probes);

}  // namespace parlab
