#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opdyn/analysis.hpp"
#include "opdyn/geometry.hpp"
#include "opdyn/rng.hpp"
#include "opdyn/update.hpp"

namespace opdyn {

// Probability weights over ordered pairs (i, j), i != j, meaning "j influences
// i". Normalized to mass 1 on construction; sampling walks a cumulative table
// in fixed pair order, so draws are reproducible.
class InterventionDistribution {
public:
    static InterventionDistribution uniform(std::size_t n);
    // weights in i-major order over ordered pairs (i, j), j != i; length n(n-1).
    static InterventionDistribution from_weights(std::size_t n, std::vector<double> weights);

    std::size_t agents() const { return n_; }
    double weight(std::size_t i, std::size_t j) const;
    double min_weight() const;
    bool full_support() const;

    AgentPair sample(CounterRng& rng) const;

private:
    InterventionDistribution(std::size_t n, std::vector<double> weights);

    std::size_t index(std::size_t i, std::size_t j) const {
        return i * (n_ - 1) + (j < i ? j : j - 1);
    }
    AgentPair pair_at(std::size_t idx) const {
        const std::size_t i = idx / (n_ - 1);
        std::size_t j = idx % (n_ - 1);
        if (j >= i) ++j;
        return {i, j};
    }

    std::size_t n_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    bool is_uniform_ = false;
};

struct StopCondition {
    enum class Kind { Polarized, Inactive };
    Kind kind = Kind::Polarized;
    double tol = kPolarTol;

    static StopCondition polarized(double tol = kPolarTol) { return {Kind::Polarized, tol}; }
    static StopCondition inactive(double eps) { return {Kind::Inactive, eps}; }
};

enum class StopReason { MaxSteps, Polarized, Inactive };

const char* stop_reason_name(StopReason r);

struct SimulationParams {
    std::size_t n = 2;
    std::size_t d = 2;
    UpdateFunctionSpec update;
    std::optional<InterventionDistribution> distribution; // default: uniform
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 1000000;
    // Any condition firing stops the run; checked every metric_every steps
    // and before the first step. MaxSteps always applies.
    std::vector<StopCondition> stop = {StopCondition::polarized()};
    std::uint64_t metric_every = 100;
    bool record_interactions = false;
    std::vector<std::uint64_t> snapshot_steps;
};

struct MetricRecord {
    std::uint64_t step = 0;
    AgentPair pair;              // interaction applied at this step
    double min_abs_corr = 0.0;
    double max_dist_to_inactive = 0.0; // max over pairs of min(|A|, 1-|A|)
    double potential_min_corr = 0.0;
    std::optional<double> potential_triangle; // n == 3 only
};

struct RunTrace {
    std::vector<std::pair<std::uint64_t, AgentPair>> interactions; // when recorded
    std::vector<MetricRecord> records;
    std::map<std::uint64_t, Configuration> snapshots;
};

struct RunSummary {
    bool polarized = false;
    std::uint64_t steps = 0;
    StopReason stop_reason = StopReason::MaxSteps;
    std::array<std::size_t, 2> cluster_sizes = {0, 0};
    double final_min_abs_corr = 0.0;
    std::uint64_t seed = 0;
};

// One interaction: j influences i, only u_i moves, and only row/column i of
// the correlation cache is refreshed.
void step(Configuration& config, AgentPair pair, const UpdateFunctionSpec& spec);

// Folds step over a fixed sequence.
void apply_sequence(Configuration& config, const std::vector<AgentPair>& pairs,
                    const UpdateFunctionSpec& spec);

struct RunResult {
    RunTrace trace;
    Configuration final_config;
    RunSummary summary;
};

// Samples interactions i.i.d. from the distribution with the seeded generator
// and applies them until a stop condition fires or max_steps is reached.
// Bit-identical across reruns with the same params.
RunResult run(const SimulationParams& params, Configuration initial);

} // namespace opdyn
