#pragma once

#include "parlab/grid.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace parlab {

/// Ellipticity constants of a coefficient field, with the derived quantities
/// used by the Gaffney and reverse-Hoelder checks.
struct EllipticityConstants {
  double lambda = 0.0;       // lower bound on Re<A xi, xi> / |xi|^2
  double Lambda = 0.0;       // upper bound on |<A xi, eta>| / (|xi||eta|)
  double alpha = 0.0;        // lambda / (4 Lambda^2)
  double rh_exponent = 0.0;  // 2 + 4/dim

  static EllipticityConstants derive(double lambda, double Lambda, int dim);
};

/// One spatial sample of the coefficient: a dim x dim complex matrix per cell,
/// acting on the gradient components carried by the cell's outgoing edges.
/// Stored in the top-left block of a fixed-size 2x2 matrix.
using CoeffSample = std::vector<Eigen::Matrix2cd>;

/// Callback producing the spatial coefficient sample at a given time.
using TimeCoefficientFn = std::function<CoeffSample(double)>;

/// Piecewise-constant-in-time coefficient field A(t,x).
struct CoefficientField {
  GridPtr grid;
  std::vector<double> breakpoints;   // 0 = b0 < ... < b_{K+1} = T
  std::vector<CoeffSample> pieces;   // one sample per interval [b_k, b_{k+1})
  EllipticityConstants ellipticity;  // measured
  double bv = 0.0;                   // sum of sup-over-cells jump norms

  double horizon() const { return breakpoints.back(); }
  int piece_count() const { return static_cast<int>(pieces.size()); }
  int piece_at(double t) const;
  Eigen::MatrixXcd matrix(int piece, int cell) const {
    return pieces[piece][cell].topLeftCorner(grid->dim, grid->dim);
  }
};

/// Scenario library. Names: "heat", "real_checkerboard", "complex_perturb",
/// "bv_staircase", "time_oscillating". Parameters are scenario-specific, see
/// the config documentation in the README.
CoefficientField make_scenario(const std::string& name, GridPtr grid,
                               const nlohmann::json& params,
                               double horizon = 1.0,
                               std::uint64_t seed = 0);

/// Measured ellipticity constants: lambda from the smallest eigenvalue of the
/// Hermitian part, Lambda from the largest singular value, over all pieces and
/// cells. Throws when the field is not elliptic.
EllipticityConstants check_ellipticity(const CoefficientField& A);

/// Staircase approximation at level j: breakpoints at horizon * m / 2^j, each
/// piece the interval average of the callback (adaptive quadrature, absolute
/// tolerance 1e-10).
CoefficientField time_average_refine(const TimeCoefficientFn& spec, GridPtr grid,
                                     int level, double horizon);

/// Extends the field to a later horizon by holding the final piece.
CoefficientField extended_to(const CoefficientField& A, double new_horizon);

double bv_seminorm(const Grid& g, const std::vector<CoeffSample>& pieces);

/// Conjugate-transposed pieces in reversed time order on [0, t - s]; the
/// forward flow of the result equals the adjoint of the original flow.
CoefficientField reversed_adjoint(const CoefficientField& A, double s, double t);

}  // namespace parlab
