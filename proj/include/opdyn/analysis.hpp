#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "opdyn/geometry.hpp"

namespace opdyn {

// Default tolerances for the predicates; the paper-level definitions are
// exact-real, so every cutoff is an explicit parameter with these defaults.
constexpr double kOrthTol = 1e-9;
constexpr double kPolarTol = 1e-6;
constexpr double kClusterEps = 1.0 / 256.0;

struct AgentPair {
    std::size_t i = 0; // the agent that moves (j influences i)
    std::size_t j = 0;

    bool operator==(const AgentPair& o) const { return i == o.i && j == o.j; }
};

struct ActivityVerdict {
    bool active = false;
    std::optional<AgentPair> witness; // lexicographically first active pair (i < j)
};

// Active iff some pair satisfies eps < |A_ij| < 1 - eps.
ActivityVerdict epsilon_activity(const Configuration& config, double eps);

struct ClusterPartition {
    std::vector<std::vector<std::size_t>> clusters;
    double epsilon = 0.0;
};

// The unique partition of an eps-inactive configuration into groups that are
// pairwise close up to sign (|A| >= 1-eps inside, |A| <= eps across).
// NotInactive if an eps-active pair exists; StructureViolation if the
// connected components fail the definition (eps too large for the geometry;
// uniqueness is guaranteed for eps <= 1/256, the verification catches misuse
// beyond that). At eps < 1/(d(d+1)) at most d clusters can exist, which is
// also verified.
ClusterPartition cluster_partition(const Configuration& config, double eps);

struct SignAssignment {
    std::vector<int> signs;  // +-1 per agent, signs[0] = +1
    double margin = 0.0;     // min over pairs of b_i b_j A_ij
};

struct ConvexityVerdict {
    bool certified = false;
    std::optional<SignAssignment> assignment;
};

// Certifies "all opinions fit in an open cone after sign flips": looks for
// b in {-1,+1}^n with b_i b_j A_ij > c + tol for all pairs. The candidate
// b_j = sgn(A_1j) is canonical: any valid assignment agrees with it up to a
// global flip, so the greedy check is exact.
ConvexityVerdict strict_convexity(const Configuration& config, double c = 0.0, double tol = 0.0);

struct SeparabilityVerdict {
    bool separable = false;
    std::vector<std::size_t> s, t; // the two mutually orthogonal groups
};

// Separable iff the graph with edges |A_ij| > tol is disconnected.
SeparabilityVerdict separability(const Configuration& config, double tol = kOrthTol);

struct PolarizationVerdict {
    bool polarized = false;
    // Sizes of agent 1's group and its complement, split by sign of A_1j.
    std::array<std::size_t, 2> group_sizes = {0, 0};
};

// Polarized iff min_{i != j} |A_ij| >= 1 - tol (consensus counts).
PolarizationVerdict polarization_check(const Configuration& config, double tol = kPolarTol);

// 1 - min_{i != j} |A_ij|; zero exactly at polarized configurations.
double potential_min_corr(const Configuration& config);

// Sum of the three pairwise effective angles; only defined for n = 3.
double potential_triangle(const Configuration& config);

} // namespace opdyn
