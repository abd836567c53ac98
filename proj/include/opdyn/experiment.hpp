#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/engine.hpp"
#include "opdyn/sequences.hpp"

namespace opdyn {

enum class InitKind { UniformSphere, FromFile, AlmostOrthogonal, Explicit };

struct InitSpec {
    InitKind kind = InitKind::UniformSphere;
    std::string path;                           // FromFile
    double low = 0.1, high = 0.9;               // AlmostOrthogonal: |A| <= low or >= high
    std::size_t bundles = 3;                    // AlmostOrthogonal: orthogonal axes used
    std::vector<std::vector<double>> opinions;  // Explicit

    static InitSpec uniform();
    static InitSpec from_file(std::string path);
    static InitSpec almost_orthogonal(double low, double high, std::size_t bundles = 3);
    static InitSpec explicit_opinions(std::vector<std::vector<double>> opinions);
};

// Builds an initial configuration; random inits draw from rng.
Configuration make_initial(const InitSpec& init, std::size_t n, std::size_t d, CounterRng& rng);

struct ExperimentSpec {
    std::string name = "experiment";
    SimulationParams params;
    std::size_t replicas = 1;
    InitSpec init;
    std::uint64_t master_seed = 1;
    // When set, replicas report the first recorded step at which the
    // configuration was eps-active at this eps.
    std::optional<double> activity_eps;
    std::string replicas_csv;    // optional output path
    std::string aggregate_json;  // optional output path
    std::string snapshot_dir;    // optional; holds per-replica snapshot files
};

struct ReplicaResult {
    std::size_t replica = 0;
    RunSummary summary;
    std::int64_t first_active_step = -1; // -1: never eps-active at activity_eps
};

struct StepsQuantiles {
    bool valid = false;
    std::uint64_t min = 0, p25 = 0, p50 = 0, p75 = 0, max = 0;
};

struct ExperimentReport {
    std::string name;
    std::size_t replicas = 0;
    std::uint64_t master_seed = 0;
    std::size_t polarized_count = 0;
    double polarization_rate = 0.0;
    StepsQuantiles steps_to_polarization; // over polarized replicas
    // Agent 1's group size at the end of each polarized replica.
    std::map<std::size_t, std::size_t> cluster_size_hist;
    double cluster_size_mean = 0.0;
    std::optional<double> activity_eps;
    std::size_t became_active_count = 0;
    std::vector<ReplicaResult> rows;
};

// Runs the replicas (seed streams derived from master_seed), writes the
// per-replica CSV and aggregate JSON when paths are set, and returns the
// report. Results are independent of the thread count.
ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned threads = 0);

// Aggregation is a pure function of the rows; run_experiment uses this and
// tests can re-derive it.
ExperimentReport aggregate_report(const ExperimentSpec& spec, std::vector<ReplicaResult> rows);

// Radicalization with an asymmetric rule: n=100, d=3, eta+=0.9, eta-=0.1,
// uniform random start, 100 replicas, snapshot at t=2500.
ExperimentSpec preset_figure1();

// Escape from an almost-orthogonal start: n=100, d=3, f(A)=0.1A, every
// initial pair has |A| <= 0.1 or >= 0.9, 100 replicas.
ExperimentSpec preset_figure2();

struct ConcentrationRow {
    double c = 0.0;
    double bound = 0.0;      // 2 exp(-c^2/2)
    double slack = 0.0;      // 3 sigma binomial slack on the empirical rate
    double empirical = 0.0;  // conditional tail among polarized replicas
    std::size_t tail_count = 0;
    bool ok = false;
};

struct ConcentrationResult {
    std::size_t n_agents = 0;
    std::size_t replicas = 0;
    std::size_t polarized = 0;
    std::vector<ConcentrationRow> rows;
};

// Tail of |size(agent 1's cluster) - (n+1)/2| over polarized replicas with a
// symmetric start, compared against 2 exp(-c^2/2). Requires an odd update
// function (NotOdd otherwise).
ConcentrationResult concentration_experiment(std::size_t n_agents,
                                             const std::vector<double>& c_values,
                                             std::size_t replicas,
                                             const UpdateFunctionSpec& spec,
                                             std::uint64_t master_seed = 1,
                                             std::size_t d = 3,
                                             std::uint64_t max_steps = 1000000,
                                             unsigned threads = 0);

struct CounterexampleVerdict {
    bool precondition_ok = false; // the epsilon inequality held before running
    bool pass = false;
    bool exhaustive = false;
    double epsilon = 0.0;
    std::uint64_t sequences_checked = 0;
    std::optional<std::vector<AgentPair>> failing_sequence;
};

// Verifies that the counterexample triple stays non-convex: every prefix of
// every length-`horizon` intervention sequence leaves strict convexity
// refuted and no correlation sign flips. Exhaustive for horizon <= 6,
// sampled otherwise.
CounterexampleVerdict counterexample_experiment(double eta, std::uint64_t horizon,
                                                std::uint64_t samples,
                                                std::optional<double> epsilon_override =
                                                    std::nullopt,
                                                std::uint64_t seed = 1);

// --- file formats ---

// One opinion per line, d whitespace-separated decimals; inputs are validated
// unit-norm within 1e-6 and renormalized.
Configuration read_opinions(const std::string& path);
void write_opinions(const std::string& path, const Configuration& config);

// Columns: step,i,j,min_abs_corr,potential_min_corr[,potential_triangle].
// Agent indices are 1-based in all files.
void write_trace_csv(const std::string& path, const RunTrace& trace, std::size_t n);

std::string run_summary_json(const RunSummary& summary);
std::string report_json(const ExperimentReport& report);
void write_replicas_csv(const std::string& path, const std::vector<ReplicaResult>& rows);

// Strict parser for the experiment config file; unknown fields are rejected.
ExperimentSpec experiment_spec_from_json(const std::string& text);
std::string experiment_spec_to_json(const ExperimentSpec& spec);

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream);

} // namespace opdyn
