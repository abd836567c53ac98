#include "opdyn/analysis.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace opdyn {

ActivityVerdict epsilon_activity(const Configuration& config, double eps) {
    if (!(eps >= 0.0 && eps < 0.5)) fail(Errc::InvalidParams, "eps must lie in [0, 1/2)");
    const std::size_t n = config.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = std::abs(config.corr(i, j));
            if (a > eps && a < 1.0 - eps) return {true, AgentPair{i, j}};
        }
    }
    return {false, std::nullopt};
}

ClusterPartition cluster_partition(const Configuration& config, double eps) {
    if (!(eps >= 0.0 && eps < 0.25))
        fail(Errc::InvalidParams, "cluster eps must lie in [0, 1/4)");
    const auto activity = epsilon_activity(config, eps);
    if (activity.active) {
        const auto& w = *activity.witness;
        fail(Errc::NotInactive, "pair (" + std::to_string(w.i + 1) + "," +
                                    std::to_string(w.j + 1) + ") is eps-active");
    }

    const std::size_t n = config.size();
    // Connected components of the closeness relation |A_ij| >= 1 - eps.
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), 0);
    const auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(config.corr(i, j)) >= 1.0 - eps) root[find(i)] = find(j);

    ClusterPartition part;
    part.epsilon = eps;
    std::vector<int> cluster_of(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (cluster_of[r] < 0) {
            cluster_of[r] = static_cast<int>(part.clusters.size());
            part.clusters.emplace_back();
        }
        cluster_of[i] = cluster_of[r];
        part.clusters[cluster_of[i]].push_back(i);
    }

    // The components only form clusters when closeness is transitive here;
    // verify the definition outright.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = std::abs(config.corr(i, j));
            if (cluster_of[i] == cluster_of[j]) {
                if (!(a >= 1.0 - eps))
                    fail(Errc::StructureViolation, "within-cluster pair below closeness bound");
            } else if (!(a <= eps)) {
                fail(Errc::StructureViolation, "cross-cluster pair above eps");
            }
        }
    }

    const double d = static_cast<double>(config.dim());
    if (eps < 1.0 / (d * (d + 1.0)) && part.clusters.size() > config.dim())
        fail(Errc::StructureViolation, "more than d clusters at eps < 1/(d(d+1))");
    return part;
}

ConvexityVerdict strict_convexity(const Configuration& config, double c, double tol) {
    if (c < 0.0 || tol < 0.0) fail(Errc::InvalidParams, "c and tol must be nonnegative");
    const std::size_t n = config.size();
    SignAssignment cand;
    cand.signs.assign(n, 1);
    for (std::size_t j = 1; j < n; ++j) {
        const double a = config.corr(0, j);
        if (std::abs(a) <= tol) return {false, std::nullopt};
        cand.signs[j] = a > 0.0 ? 1 : -1;
    }
    cand.margin = 1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            cand.margin = std::min(cand.margin,
                                   cand.signs[i] * cand.signs[j] * config.corr(i, j));
    if (cand.margin > c + tol) return {true, cand};
    return {false, std::nullopt};
}

SeparabilityVerdict separability(const Configuration& config, double tol) {
    if (tol < 0.0) fail(Errc::InvalidParams, "tol must be nonnegative");
    const std::size_t n = config.size();
    std::vector<bool> reached(n, false);
    std::vector<std::size_t> stack = {0};
    reached[0] = true;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j) {
            if (!reached[j] && std::abs(config.corr(i, j)) > tol && i != j) {
                reached[j] = true;
                stack.push_back(j);
            }
        }
    }
    SeparabilityVerdict v;
    for (std::size_t i = 0; i < n; ++i) (reached[i] ? v.s : v.t).push_back(i);
    v.separable = !v.t.empty();
    if (!v.separable) v.s.clear();
    return v;
}

PolarizationVerdict polarization_check(const Configuration& config, double tol) {
    if (!(tol > 0.0 && tol < 1.0)) fail(Errc::InvalidParams, "tol must lie in (0, 1)");
    PolarizationVerdict v;
    v.polarized = config.correlations().min_abs_offdiag() >= 1.0 - tol;
    std::size_t with_first = 1;
    for (std::size_t j = 1; j < config.size(); ++j)
        if (config.corr(0, j) > 0.0) ++with_first;
    v.group_sizes = {with_first, config.size() - with_first};
    return v;
}

double potential_min_corr(const Configuration& config) {
    if (config.size() < 2) fail(Errc::InvalidParams, "potential needs n >= 2");
    return 1.0 - config.correlations().min_abs_offdiag();
}

double potential_triangle(const Configuration& config) {
    if (config.size() != 3)
        fail(Errc::WrongArity, "triangle potential needs exactly 3 opinions");
    return effective_angle_from_corr(config.corr(0, 1)) +
           effective_angle_from_corr(config.corr(0, 2)) +
           effective_angle_from_corr(config.corr(1, 2));
}

} // namespace opdyn
