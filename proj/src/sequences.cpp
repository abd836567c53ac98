#include "opdyn/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace opdyn {

namespace {

// Simulates while recording, so every drive loop observes the exact
// correlations the script will produce when replayed.
class ScriptBuilder {
public:
    ScriptBuilder(const Configuration& start, const UpdateFunctionSpec& spec)
        : working_(start), spec_(spec) {}

    void apply(AgentPair p) {
        if (pairs_.size() >= kScriptCap)
            fail(Errc::StructureViolation, "script exceeds the hard cap");
        step(working_, p, spec_);
        pairs_.push_back(p);
    }

    // Repeated (i, j) until |A_ij| >= floor_abs_corr.
    void drive(std::size_t i, std::size_t j, double floor_abs_corr) {
        while (std::abs(working_.corr(i, j)) < floor_abs_corr) {
            const double before = working_.corr(i, j);
            apply({i, j});
            if (working_.corr(i, j) == before)
                fail(Errc::StructureViolation, "drive stalled before its target");
        }
    }

    const Configuration& config() const { return working_; }
    std::vector<AgentPair> take_pairs() { return std::move(pairs_); }

private:
    Configuration working_;
    const UpdateFunctionSpec& spec_;
    std::vector<AgentPair> pairs_;
};

void require_stable(const UpdateFunctionSpec& spec) {
    if (!classify(spec).is_stable) fail(Errc::NotStable, format_update_spec(spec));
}

void require_index(const Configuration& config, std::size_t i) {
    if (i >= config.size()) fail(Errc::IndexOutOfRange, "agent index " + std::to_string(i));
}

// Connected components of the closeness relation |A_kl| >= 1 - eps.
std::vector<int> closeness_components(const Configuration& config, double eps,
                                      std::size_t* count_out) {
    const std::size_t n = config.size();
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), 0);
    const auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(config.corr(i, j)) >= 1.0 - eps) root[find(i)] = find(j);
    std::vector<int> comp(n, -1);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (comp[r] < 0) comp[r] = static_cast<int>(count++);
        comp[i] = comp[r];
    }
    if (count_out) *count_out = count;
    return comp;
}

} // namespace

InterventionScript drive_pair_close(const Configuration& config, std::size_t i, std::size_t j,
                                    const UpdateFunctionSpec& spec, double target_eps,
                                    std::optional<double> divide_factor) {
    require_stable(spec);
    require_index(config, i);
    require_index(config, j);
    if (i == j) fail(Errc::IndexOutOfRange, "pair must be distinct");
    if (!(target_eps > 0.0 && target_eps < 1.0))
        fail(Errc::InvalidParams, "target_eps must lie in (0, 1)");
    if (divide_factor && !(*divide_factor > 1.0))
        fail(Errc::InvalidParams, "divide_factor must exceed 1");

    const double a0 = std::abs(config.corr(i, j));
    if (a0 <= kOrthTol)
        fail(Errc::NoProgress, "|A_ij| = " + std::to_string(a0) + " is orthogonal at tolerance");

    ScriptBuilder builder(config, spec);
    if (divide_factor) {
        const double gamma0 = effective_angle_from_corr(config.corr(i, j));
        const double goal = gamma0 / *divide_factor;
        while (effective_angle_from_corr(builder.config().corr(i, j)) > goal) {
            const double before = builder.config().corr(i, j);
            builder.apply({i, j});
            if (builder.config().corr(i, j) == before)
                fail(Errc::StructureViolation, "drive stalled before its target");
        }
    } else {
        builder.drive(i, j, 1.0 - target_eps);
    }
    InterventionScript script;
    script.pairs = builder.take_pairs();
    script.intent = ScriptIntent::DrivePairClose;
    script.certified_postcondition =
        divide_factor ? "effective-angle-divided" : "pair-abs-corr-above-floor";
    return script;
}

InterventionScript greedy_inactivation(const Configuration& config, double eps,
                                       const UpdateFunctionSpec& spec) {
    require_stable(spec);
    if (!(eps > 0.0 && eps < 0.25)) fail(Errc::InvalidParams, "eps must lie in (0, 1/4)");

    InterventionScript script;
    script.intent = ScriptIntent::Inactivate;
    script.certified_postcondition = "eps-inactive";
    if (!epsilon_activity(config, eps).active) return script;

    const double eps0 = (eps / 64.0) * (eps / 64.0);
    const std::size_t n = config.size();

    // Greedy maximal core of pairwise almost-orthogonal opinions.
    std::vector<std::size_t> core;
    std::vector<bool> in_core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = true;
        for (std::size_t g : core)
            if (std::abs(config.corr(i, g)) > eps0) {
                ok = false;
                break;
            }
        if (ok) {
            core.push_back(i);
            in_core[i] = true;
        }
    }

    ScriptBuilder builder(config, spec);
    std::vector<std::size_t> rep(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (in_core[j]) continue;
        for (std::size_t g : core)
            if (std::abs(config.corr(j, g)) > eps0) {
                rep[j] = g;
                break;
            }
        // Maximality of the core guarantees a representative exists.
        builder.drive(j, rep[j], 1.0 - eps0);
    }

    // Re-verify the case analysis behind the construction, then the target
    // predicate itself.
    const Configuration& out = builder.config();
    const double root_eps0 = std::sqrt(eps0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = std::abs(out.corr(i, j));
            bool ok = true;
            if (in_core[i] && in_core[j]) {
                ok = a <= eps0;
            } else if (in_core[i] != in_core[j]) {
                const std::size_t r = in_core[i] ? rep[j] : rep[i];
                const std::size_t g = in_core[i] ? i : j;
                ok = (r == g) ? a >= 1.0 - eps0 : a <= 8.0 * root_eps0;
            } else {
                ok = (rep[i] == rep[j]) ? a >= 1.0 - 4.0 * eps0 : a <= 64.0 * root_eps0;
            }
            if (!ok)
                fail(Errc::StructureViolation, "inactivation case analysis failed on pair (" +
                                                   std::to_string(i) + "," + std::to_string(j) +
                                                   ")");
        }
    }
    if (epsilon_activity(out, eps).active)
        fail(Errc::StructureViolation, "output is still eps-active");

    script.pairs = builder.take_pairs();
    return script;
}

InterventionScript quadrant_2d(const Configuration& config, const UpdateFunctionSpec& spec) {
    require_stable(spec);
    if (config.dim() != 2) fail(Errc::PreconditionViolated, "requires d = 2");
    const double eps = kClusterEps;
    if (epsilon_activity(config, eps).active)
        fail(Errc::PreconditionViolated, "configuration is eps-active");
    if (!epsilon_activity(config, 0.0).active)
        fail(Errc::PreconditionViolated, "configuration is inactive");
    if (separability(config).separable)
        fail(Errc::PreconditionViolated, "configuration is separable");

    InterventionScript script;
    script.intent = ScriptIntent::Quadrant2D;
    script.certified_postcondition = "strictly-convex";

    const ClusterPartition part = cluster_partition(config, eps);
    if (part.clusters.size() == 1) {
        // One tight cluster is already strictly convex.
        if (!strict_convexity(config).certified)
            fail(Errc::StructureViolation, "single cluster not certified convex");
        return script;
    }

    // Two clusters (d = 2 admits no more): freeze the closest cross-cluster
    // pair, shrink everyone else onto their cluster representative.
    const std::size_t n = config.size();
    std::vector<int> cluster_of(n, 0);
    for (std::size_t c = 0; c < part.clusters.size(); ++c)
        for (std::size_t i : part.clusters[c]) cluster_of[i] = static_cast<int>(c);

    std::size_t r1 = 0, r2 = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (cluster_of[i] != cluster_of[j] && std::abs(config.corr(i, j)) > best) {
                best = std::abs(config.corr(i, j));
                r1 = i;
                r2 = j;
            }

    ScriptBuilder builder(config, spec);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == r1 || k == r2) continue;
        const std::size_t w = cluster_of[k] == cluster_of[r1] ? r1 : r2;
        const double gamma0 = effective_angle_from_corr(config.corr(k, w));
        const double goal = gamma0 / 8.0;
        while (effective_angle_from_corr(builder.config().corr(k, w)) > goal) {
            const double before = builder.config().corr(k, w);
            builder.apply({k, w});
            if (builder.config().corr(k, w) == before)
                fail(Errc::StructureViolation, "drive stalled before its target");
        }
    }

    if (!strict_convexity(builder.config()).certified)
        fail(Errc::StructureViolation, "output not certified strictly convex");
    script.pairs = builder.take_pairs();
    return script;
}

InterventionScript active_convexify(const Configuration& config, const UpdateFunctionSpec& spec) {
    const FunctionClassification cls = classify(spec);
    if (!cls.is_active) fail(Errc::NotActive, format_update_spec(spec));

    const double c = std::abs(*cls.sign_change_point);
    const double eps = 0.5 * std::min(1.0 - c, kClusterEps);
    const double eps0 = eps / 4.0;

    ScriptBuilder builder(config, spec);
    for (std::size_t i = 1; i < config.size(); ++i) builder.drive(i, 0, 1.0 - eps0);

    if (!strict_convexity(builder.config(), c).certified)
        fail(Errc::StructureViolation, "output not certified c-strictly convex");

    InterventionScript script;
    script.intent = ScriptIntent::ActiveConvexify;
    script.certified_postcondition = "c-strictly-convex";
    script.pairs = builder.take_pairs();
    return script;
}

InterventionScript cluster_merge(const Configuration& config, AgentPair witness, double eps,
                                 const UpdateFunctionSpec& spec) {
    require_stable(spec);
    require_index(config, witness.i);
    require_index(config, witness.j);
    if (witness.i == witness.j) fail(Errc::IndexOutOfRange, "witness must be distinct");
    if (!(eps > kOrthTol && eps < 0.25)) fail(Errc::InvalidParams, "eps must lie in (1e-9, 1/4)");

    const std::size_t n = config.size();
    std::size_t count_in = 0;
    const std::vector<int> comp = closeness_components(config, eps, &count_in);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (comp[i] == comp[j] && std::abs(config.corr(i, j)) < 1.0 - eps)
                fail(Errc::PreconditionViolated, "cluster structure inconsistent at eps");
    if (comp[witness.i] == comp[witness.j])
        fail(Errc::PreconditionViolated, "witness pair lies in one cluster");
    if (!(std::abs(config.corr(witness.i, witness.j)) > eps))
        fail(Errc::PreconditionViolated, "witness correlation does not exceed eps");
    // Only the agent moved by the activating interaction may carry stray
    // active correlations; anything else contradicts prior eps-inactivity.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = std::abs(config.corr(i, j));
            if (a > eps && a < 1.0 - eps && i != witness.i && j != witness.i)
                fail(Errc::PreconditionViolated,
                     "active pair not involving the moved agent");
        }

    const double eps_tight = eps * eps / 16.0;
    ScriptBuilder builder(config, spec);
    std::vector<bool> merged(n, false);
    for (std::size_t k = 0; k < n; ++k) merged[k] = comp[k] == comp[witness.i];

    // One round absorbs the component of q into the merged set, using p as
    // the anchor (|A_pq| > eps guarantees progress for every hop).
    const auto absorb = [&](std::size_t p, std::size_t q) {
        for (std::size_t l = 0; l < n; ++l) {
            if (comp[l] != comp[q] || l == q) continue;
            builder.drive(l, q, 1.0 - eps_tight);
            builder.drive(l, p, 1.0 - eps_tight);
        }
        builder.drive(q, p, 1.0 - eps_tight);
        for (std::size_t k = 0; k < n; ++k)
            if (comp[k] == comp[q]) merged[k] = true;
        for (std::size_t m = 0; m < n; ++m)
            if (merged[m] && m != p) builder.drive(m, p, 1.0 - eps_tight);
    };

    absorb(witness.i, witness.j);
    std::size_t rounds = 1;
    while (true) {
        const auto activity = epsilon_activity(builder.config(), eps);
        if (!activity.active) break;
        if (rounds >= count_in)
            fail(Errc::StructureViolation, "merge did not settle within cluster count");
        const AgentPair w = *activity.witness;
        const bool i_in = merged[w.i], j_in = merged[w.j];
        if (i_in == j_in)
            fail(Errc::StructureViolation, "unexpected activation inside/outside merged set");
        absorb(i_in ? w.i : w.j, i_in ? w.j : w.i);
        ++rounds;
    }

    std::size_t count_out = 0;
    closeness_components(builder.config(), eps, &count_out);
    if (count_out >= count_in)
        fail(Errc::StructureViolation, "cluster count did not decrease");

    InterventionScript script;
    script.intent = ScriptIntent::ClusterMerge;
    script.certified_postcondition = "eps-inactive-fewer-clusters";
    script.pairs = builder.take_pairs();
    return script;
}

CounterexampleSpec counterexample(std::size_t d, double eta, std::uint64_t horizon) {
    if (d < 3) fail(Errc::InvalidParams, "requires d >= 3");
    if (!(eta > 0.0)) fail(Errc::InvalidParams, "eta must be positive");
    if (horizon < 1) fail(Errc::InvalidParams, "horizon must be >= 1");

    const double growth = std::pow(1.0 + eta, 2.0 * static_cast<double>(horizon));
    const double factor = (eta + (2.0 * eta + eta * eta) / 2.0) *
                          static_cast<double>(horizon) * growth;
    double epsilon = 0.0;
    for (int k = 1; k <= 600; ++k) {
        const double cand = std::pow(10.0, -static_cast<double>(k) / 4.0);
        // Admissibility: cand/2 >= cand^2 * factor, plus cand < 1/2 so the
        // three correlations are realizable on the sphere.
        if (cand < 0.5 && 0.5 >= cand * factor) {
            epsilon = cand;
            break;
        }
    }
    if (epsilon == 0.0) fail(Errc::InvalidParams, "no admissible epsilon on the grid");

    Vec u1(d, 0.0), u2(d, 0.0), u3(d, 0.0);
    u1[0] = 1.0;
    u2[0] = epsilon;
    u2[1] = std::sqrt(1.0 - epsilon * epsilon);
    u3[0] = epsilon;
    u3[1] = (-epsilon - epsilon * epsilon) / std::sqrt(1.0 - epsilon * epsilon);
    u3[2] = std::sqrt(1.0 - epsilon * epsilon - u3[1] * u3[1]);
    Configuration cfg({Opinion(u1), normalize(u2), normalize(u3)});

    if (std::abs(cfg.corr(0, 1) - epsilon) > 1e-12 || std::abs(cfg.corr(0, 2) - epsilon) > 1e-12 ||
        std::abs(cfg.corr(1, 2) + epsilon) > 1e-12)
        fail(Errc::StructureViolation, "constructed correlations off target");

    return CounterexampleSpec{d, eta, horizon, epsilon, std::move(cfg)};
}

double inactivity_preservation_epsilon(const UpdateFunctionSpec& spec, double eps0) {
    require_stable(spec);
    if (!(eps0 > 0.0 && eps0 <= kClusterEps))
        fail(Errc::InvalidParams, "eps0 must lie in (0, 1/256]");
    const double m = (eps0 / 8.0) * (eps0 / 8.0);
    double c;
    switch (spec.family) {
        case UpdateFamily::Linear:
            c = std::min(1.0, m / spec.eta);
            break;
        case UpdateFamily::AsymmetricLinear:
            c = std::min(1.0, m / std::max(spec.eta_plus, spec.eta_minus));
            break;
        default: {
            // |f| is monotone near zero for the supported stable families;
            // bisect for the widest interval with |f| <= m.
            double lo = 0.0, hi = 1.0;
            const auto over = [&](double x) {
                return std::max(std::abs(evaluate(spec, x)), std::abs(evaluate(spec, -x))) > m;
            };
            if (!over(1.0)) {
                c = 1.0;
                break;
            }
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                (over(mid) ? hi : lo) = mid;
            }
            c = lo;
            break;
        }
    }
    return std::min(c, m);
}

} // namespace opdyn
