#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/analysis.hpp"
#include "opdyn/engine.hpp"
#include "opdyn/update.hpp"

namespace opdyn {

enum class ScriptIntent { DrivePairClose, Inactivate, Quadrant2D, ActiveConvexify, ClusterMerge };

// A finite, deterministic sequence of interactions together with the
// predicate it guarantees on the resulting configuration. Builders simulate
// while constructing, so lengths are tight (no worst-case constants) and the
// postcondition is checked before the script is returned.
struct InterventionScript {
    std::vector<AgentPair> pairs;
    ScriptIntent intent = ScriptIntent::DrivePairClose;
    std::string certified_postcondition;
};

// Hard cap on script length; exceeding it raises StructureViolation.
constexpr std::size_t kScriptCap = 1000000;

// Repeated (i, j) interactions until |A_ij| >= 1 - target_eps, or, when
// divide_factor k is given, until the effective angle drops to gamma/k.
// Requires a stable update function and |A_ij| > kOrthTol (NoProgress).
InterventionScript drive_pair_close(const Configuration& config, std::size_t i, std::size_t j,
                                    const UpdateFunctionSpec& spec, double target_eps,
                                    std::optional<double> divide_factor = std::nullopt);

// Greedy flattening into an eps-inactive configuration: pick a maximal
// pairwise almost-orthogonal core (at eps0 = (eps/64)^2), then pull every
// remaining agent tight onto a core representative it correlates with.
InterventionScript greedy_inactivation(const Configuration& config, double eps,
                                       const UpdateFunctionSpec& spec);

// d = 2 only: turns a (1/256)-inactive, active, non-separable configuration
// into a strictly convex one. With two clusters, the closest cross-cluster
// pair is frozen and every other agent has its effective angle to its cluster
// representative divided by 8.
InterventionScript quadrant_2d(const Configuration& config, const UpdateFunctionSpec& spec);

// Active update functions: agent 1 drives every other agent until all
// |A_1i| are near 1, which certifies c-strict convexity at c = |A0|.
InterventionScript active_convexify(const Configuration& config, const UpdateFunctionSpec& spec);

// Merges the clusters of the witness endpoints after an activation event
// (|A_ij| > eps across clusters), hopping agents across via tightening
// drives at eps' = eps^2/16; re-runs if the drives activate further
// clusters. The result is eps-inactive with strictly fewer clusters.
InterventionScript cluster_merge(const Configuration& config, AgentPair witness, double eps,
                                 const UpdateFunctionSpec& spec);

// Three opinions with correlations (eps, eps, -eps): not strictly convex, and
// under the linear update rule with rate eta no sequence of `horizon`
// interventions can change that, because eps satisfies
//   eps/2 >= eps^2 (eta + (2 eta + eta^2)/2) * horizon * (1 + eta)^(2 horizon).
struct CounterexampleSpec {
    std::size_t d = 3;
    double eta = 0.0;
    std::uint64_t horizon = 0;
    double epsilon = 0.0;
    Configuration configuration;
};

// Picks the largest epsilon on the grid {10^(-k/4)} satisfying the bound
// above and realizes the correlations exactly (to 1e-12) in the first three
// coordinates.
CounterexampleSpec counterexample(std::size_t d, double eta, std::uint64_t horizon);

// Largest eps such that one interaction maps any eps-inactive configuration
// to an eps0-inactive one with identical clusters; eps = min(c(M), M) with
// M = (eps0/8)^2 and c(M) the widest interval where |f| <= M.
double inactivity_preservation_epsilon(const UpdateFunctionSpec& spec, double eps0);

} // namespace opdyn
