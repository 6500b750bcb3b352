#pragma once

#include "parlab/coeffs.hpp"
#include "parlab/evolve.hpp"
#include "parlab/grid.hpp"
#include "parlab/norms.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace parlab {

/// One measured/bound pair. pass requires measured <= bound (tiny epsilon).
struct Measurement {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // measured / bound
  bool pass = true;
  std::string formula;  // bound provenance, recorded as text
};

struct CheckReport {
  std::string check_id;
  std::string scenario;
  std::vector<Measurement> rows;
  bool pass = true;
  std::string tolerance_policy;

  void add(const std::string& name, double measured, double bound,
           const std::string& formula = "");
  /// Informational row: recorded but never gates the verdict.
  void note(const std::string& name, double measured, double bound = 0.0,
            const std::string& formula = "");
};

/// How to rebuild the scenario, for refinement-stability checks.
struct ScenarioSpec {
  std::string name;
  nlohmann::json params;
  int dim = 1;
  int points_per_axis = 64;
  double period = 16.0;
  double horizon = 1.0;
  std::uint64_t seed = 1;

  CoefficientField build(int n) const;
  CoefficientField build() const { return build(points_per_axis); }
};

/// Everything a registered check may need.
struct RunContext {
  GridPtr grid;
  std::shared_ptr<const CoefficientField> coeffs;
  std::shared_ptr<const Propagator> prop;
  Scheme scheme;
  double horizon = 1.0;
  int delta_levels = 8;
  std::vector<double> p_list = {1.0, 2.0, 4.0};
  std::uint64_t seed = 1;
  ScenarioSpec scenario;
  nlohmann::json overrides;
};

// ---- individual checks ----------------------------------------------------

CheckReport check_contraction(const Propagator& P, std::uint64_t seed);
CheckReport check_offdiagonal(const Propagator& P, const std::vector<int>& E,
                              const std::vector<int>& F, double t, double s);
CheckReport check_conservation(const Propagator& P, std::uint64_t seed);
CheckReport check_norm_equivalence(const Propagator& P, const SpaceField& u0);
CheckReport check_energy_equality(const Propagator& P, const SpaceField& u0,
                                  double T);
CheckReport check_interior_representation(const Propagator& P,
                                          const SpaceTimeField& u, double s,
                                          double t, std::uint64_t seed,
                                          double tolerance);
CheckReport check_reverse_holder(const ScenarioSpec& sc, std::uint64_t seed);
CheckReport check_local_energy(const Propagator& P, const SpaceField& u0,
                               int center_cell, double r, double a, double b);
CheckReport check_max_square(const ScenarioSpec& sc,
                             const std::vector<double>& p_list,
                             int delta_levels, std::uint64_t seed);
CheckReport check_struct_bound(const Propagator& P, const SpaceField& u0);
CheckReport check_whitney_fatou(const Propagator& P, const SpaceField& u0,
                                int whitney_levels);
CheckReport check_bv_uniformity(const ScenarioSpec& sc, double p,
                                const std::vector<double>& budgets,
                                const std::vector<int>& jump_counts,
                                std::uint64_t seed);
CheckReport check_kernel_gaussian(const ScenarioSpec& sc, std::uint64_t seed);
CheckReport check_duhamel(const Propagator& P, std::uint64_t seed);

// ---- registry --------------------------------------------------------------

struct CheckDescriptor {
  std::string id;
  std::string anchor;     // the quantitative claim being checked
  std::string tolerance;  // default gating tolerance
};

/// All known check ids with anchors and default tolerances, alphabetical.
const std::vector<CheckDescriptor>& check_descriptors();
bool is_known_check(const std::string& id);
/// Accepts ids with or without the "check_" prefix.
std::string canonical_check_id(const std::string& id);

/// Runs one check by id against the context.
CheckReport run_check(const std::string& id, const RunContext& ctx);

/// Estimate of the l^p -> l^p operator norm of a dense matrix (power method
/// with dual norms, several deterministic restarts; a lower bound).
double lp_operator_norm(const Matrix& M, double p, std::uint64_t seed);

}  // namespace parlab
