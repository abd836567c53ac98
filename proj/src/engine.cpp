#include "opdyn/engine.hpp"

#include <algorithm>
#include <cmath>

namespace opdyn {

InterventionDistribution::InterventionDistribution(std::size_t n, std::vector<double> weights)
    : n_(n), weights_(std::move(weights)) {
    if (n < 2) fail(Errc::InvalidParams, "distribution needs n >= 2");
    if (weights_.size() != n * (n - 1))
        fail(Errc::InvalidParams, "expected n(n-1) ordered-pair weights");
    double total = 0.0;
    for (double w : weights_) {
        if (w < 0.0) fail(Errc::InvalidParams, "negative weight");
        total += w;
    }
    if (total <= 0.0) fail(Errc::InvalidParams, "zero total weight");
    for (double& w : weights_) w /= total;
    cumulative_.resize(weights_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        acc += weights_[k];
        cumulative_[k] = acc;
    }
    cumulative_.back() = 1.0;
}

InterventionDistribution InterventionDistribution::uniform(std::size_t n) {
    if (n < 2) fail(Errc::InvalidParams, "distribution needs n >= 2");
    InterventionDistribution d(n, std::vector<double>(n * (n - 1), 1.0));
    d.is_uniform_ = true;
    return d;
}

InterventionDistribution InterventionDistribution::from_weights(std::size_t n,
                                                                std::vector<double> weights) {
    return InterventionDistribution(n, std::move(weights));
}

double InterventionDistribution::weight(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_ || i == j) fail(Errc::IndexOutOfRange, "pair index");
    return weights_[index(i, j)];
}

double InterventionDistribution::min_weight() const {
    return *std::min_element(weights_.begin(), weights_.end());
}

bool InterventionDistribution::full_support() const { return min_weight() > 0.0; }

AgentPair InterventionDistribution::sample(CounterRng& rng) const {
    if (is_uniform_) {
        const std::size_t idx = static_cast<std::size_t>(rng.next_below(weights_.size()));
        return pair_at(idx);
    }
    const double u = rng.next_unit();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t idx =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                              cumulative_.size() - 1);
    return pair_at(idx);
}

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::MaxSteps: return "max_steps";
        case StopReason::Polarized: return "polarized";
        case StopReason::Inactive: return "inactive";
    }
    return "unknown";
}

void step(Configuration& config, AgentPair pair, const UpdateFunctionSpec& spec) {
    if (pair.i >= config.size() || pair.j >= config.size() || pair.i == pair.j)
        fail(Errc::IndexOutOfRange, "step pair (" + std::to_string(pair.i) + "," +
                                        std::to_string(pair.j) + ")");
    Opinion updated = apply_update(config.opinion(pair.i), config.opinion(pair.j), spec);
    if (updated == config.opinion(pair.i)) return; // fixed point: leave the cache untouched
    config.replace_opinion(pair.i, std::move(updated));
}

void apply_sequence(Configuration& config, const std::vector<AgentPair>& pairs,
                    const UpdateFunctionSpec& spec) {
    for (const AgentPair& p : pairs) step(config, p, spec);
}

namespace {

std::optional<StopReason> check_stop(const Configuration& config,
                                     const std::vector<StopCondition>& conditions) {
    for (const StopCondition& c : conditions) {
        switch (c.kind) {
            case StopCondition::Kind::Polarized:
                if (1.0 - config.correlations().min_abs_offdiag() <= c.tol)
                    return StopReason::Polarized;
                break;
            case StopCondition::Kind::Inactive:
                if (config.correlations().max_dist_to_inactive() <= c.tol)
                    return StopReason::Inactive;
                break;
        }
    }
    return std::nullopt;
}

MetricRecord make_record(std::uint64_t t, AgentPair pair, const Configuration& config) {
    MetricRecord r;
    r.step = t;
    r.pair = pair;
    r.min_abs_corr = config.correlations().min_abs_offdiag();
    r.max_dist_to_inactive = config.correlations().max_dist_to_inactive();
    r.potential_min_corr = 1.0 - r.min_abs_corr;
    if (config.size() == 3) r.potential_triangle = potential_triangle(config);
    return r;
}

double polarization_tol(const SimulationParams& params) {
    for (const StopCondition& c : params.stop)
        if (c.kind == StopCondition::Kind::Polarized) return c.tol;
    return kPolarTol;
}

} // namespace

RunResult run(const SimulationParams& params, Configuration initial) {
    if (params.n < 2) fail(Errc::InvalidParams, "run needs n >= 2");
    if (initial.size() != params.n)
        fail(Errc::InvalidParams, "initial configuration has wrong agent count");
    if (initial.dim() != params.d)
        fail(Errc::InvalidParams, "initial configuration has wrong dimension");
    if (params.metric_every == 0) fail(Errc::InvalidParams, "metric_every must be positive");
    for (const StopCondition& c : params.stop)
        if (!(c.tol > 0.0 && c.tol < 1.0))
            fail(Errc::InvalidParams, "stop tolerance must lie in (0, 1)");
    const InterventionDistribution& dist =
        params.distribution ? *params.distribution
                            : InterventionDistribution::uniform(params.n);
    if (dist.agents() != params.n)
        fail(Errc::InvalidParams, "distribution agent count mismatch");

    RunResult result{RunTrace{}, std::move(initial), RunSummary{}};
    Configuration& config = result.final_config;
    CounterRng rng(params.seed);

    std::uint64_t t = 0;
    std::optional<StopReason> stopped = check_stop(config, params.stop);
    auto snapshot_due = [&](std::uint64_t at) {
        return std::find(params.snapshot_steps.begin(), params.snapshot_steps.end(), at) !=
               params.snapshot_steps.end();
    };
    if (snapshot_due(0)) result.trace.snapshots.emplace(0, config);

    while (!stopped && t < params.max_steps) {
        const AgentPair pair = dist.sample(rng);
        ++t;
        step(config, pair, params.update);
        if (params.record_interactions) result.trace.interactions.emplace_back(t, pair);
        if (snapshot_due(t)) result.trace.snapshots.emplace(t, config);
        if (t % params.metric_every == 0 || t == params.max_steps) {
            result.trace.records.push_back(make_record(t, pair, config));
            stopped = check_stop(config, params.stop);
        }
    }

    RunSummary& s = result.summary;
    s.steps = t;
    s.stop_reason = stopped.value_or(StopReason::MaxSteps);
    s.seed = params.seed;
    s.final_min_abs_corr = config.correlations().min_abs_offdiag();
    const auto polar = polarization_check(config, polarization_tol(params));
    s.polarized = polar.polarized;
    s.cluster_sizes = polar.group_sizes;
    return result;
}

} // namespace opdyn
