// opdyn — seeded simulator and analysis CLI for opinion dynamics on the unit
// sphere. Subcommands: simulate, experiment, analyze.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "opdyn/analysis.hpp"
#include "opdyn/engine.hpp"
#include "opdyn/experiment.hpp"

using namespace opdyn;
using nlohmann::json;

namespace {

InitSpec parse_init(const std::string& text) {
    if (text == "uniform") return InitSpec::uniform();
    if (text.rfind("file:", 0) == 0) return InitSpec::from_file(text.substr(5));
    if (text.rfind("almost-orth:", 0) == 0) {
        const std::string body = text.substr(12);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            fail(Errc::InvalidSpec, "expected almost-orth:<low>,<high>");
        return InitSpec::almost_orthogonal(std::stod(body.substr(0, comma)),
                                           std::stod(body.substr(comma + 1)));
    }
    fail(Errc::InvalidSpec, "unknown init '" + text + "'");
}

std::vector<StopCondition> parse_stop_flag(const std::string& text) {
    if (text == "steps") return {};
    const auto colon = text.find(':');
    const std::string kind = colon == std::string::npos ? text : text.substr(0, colon);
    const double tol = colon == std::string::npos ? kPolarTol : std::stod(text.substr(colon + 1));
    if (kind == "polarized") return {StopCondition::polarized(tol)};
    if (kind == "inactive") return {StopCondition::inactive(tol)};
    fail(Errc::InvalidSpec, "unknown stop rule '" + text + "'");
}

int cmd_simulate(std::size_t n, std::size_t d, const std::string& update, std::uint64_t steps,
                 std::uint64_t seed, const std::string& init, const std::string& stop,
                 std::uint64_t metric_every, const std::string& trace_path,
                 const std::string& summary_path) {
    SimulationParams params;
    params.n = n;
    params.d = d;
    params.update = parse_update_spec(update);
    params.max_steps = steps;
    params.seed = seed;
    params.stop = parse_stop_flag(stop);
    params.metric_every = metric_every;

    CounterRng init_rng(seed, 1);
    Configuration initial = make_initial(parse_init(init), n, d, init_rng);
    RunResult res = run(params, std::move(initial));

    if (!trace_path.empty()) write_trace_csv(trace_path, res.trace, n);
    const std::string summary = run_summary_json(res.summary);
    if (!summary_path.empty()) {
        std::ofstream out(summary_path);
        if (!out) fail(Errc::IoError, "cannot write " + summary_path);
        out << summary << "\n";
    }
    std::cout << summary << "\n";
    return 0;
}

int cmd_experiment(const std::string& preset, const std::string& config_path,
                   std::size_t replicas_override, std::uint64_t seed_override, bool seed_set,
                   const std::string& out_dir, unsigned threads) {
    std::filesystem::create_directories(out_dir);

    if (preset == "concentration") {
        const std::size_t replicas = replicas_override ? replicas_override : 400;
        const std::uint64_t seed = seed_set ? seed_override : 1;
        const auto result =
            concentration_experiment(101, {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}, replicas,
                                     UpdateFunctionSpec::linear(0.1), seed, 3, 1000000, threads);
        json j;
        j["n"] = result.n_agents;
        j["replicas"] = result.replicas;
        j["polarized"] = result.polarized;
        json rows = json::array();
        for (const auto& r : result.rows)
            rows.push_back({{"c", r.c},
                            {"bound", r.bound},
                            {"slack", r.slack},
                            {"empirical", r.empirical},
                            {"tail_count", r.tail_count},
                            {"ok", r.ok}});
        j["tail"] = rows;
        std::ofstream out(out_dir + "/concentration.json");
        out << j.dump(2) << "\n";
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (preset == "counterexample") {
        const std::uint64_t seed = seed_set ? seed_override : 1;
        const auto exhaustive = counterexample_experiment(0.1, 6, 0, std::nullopt, seed);
        const auto sampled = counterexample_experiment(0.1, 10, 100000, std::nullopt, seed);
        json j;
        for (const auto& [label, v] :
             {std::pair<std::string, const CounterexampleVerdict&>{"horizon6", exhaustive},
              std::pair<std::string, const CounterexampleVerdict&>{"horizon10", sampled}}) {
            j[label] = {{"pass", v.pass},
                        {"exhaustive", v.exhaustive},
                        {"epsilon", v.epsilon},
                        {"sequences_checked", v.sequences_checked}};
        }
        std::ofstream out(out_dir + "/counterexample.json");
        out << j.dump(2) << "\n";
        std::cout << j.dump(2) << "\n";
        return exhaustive.pass && sampled.pass ? 0 : 1;
    }

    ExperimentSpec spec;
    if (preset == "figure1") {
        spec = preset_figure1();
    } else if (preset == "figure2") {
        spec = preset_figure2();
    } else if (!preset.empty()) {
        fail(Errc::InvalidSpec, "unknown preset '" + preset + "'");
    } else if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) fail(Errc::IoError, "cannot read " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        spec = experiment_spec_from_json(buf.str());
    } else {
        fail(Errc::InvalidSpec, "need --preset or --config");
    }

    if (replicas_override) spec.replicas = replicas_override;
    if (seed_set) spec.master_seed = seed_override;
    if (spec.replicas_csv.empty()) spec.replicas_csv = out_dir + "/" + spec.name + "_replicas.csv";
    if (spec.aggregate_json.empty())
        spec.aggregate_json = out_dir + "/" + spec.name + "_aggregate.json";
    if (spec.snapshot_dir.empty() && !spec.params.snapshot_steps.empty())
        spec.snapshot_dir = out_dir;

    const ExperimentReport report = run_experiment(spec, threads);
    std::cout << report_json(report) << "\n";
    return 0;
}

int cmd_analyze(const std::string& config_path, double eps) {
    Configuration config = read_opinions(config_path);
    json j;
    j["n"] = config.size();
    j["d"] = config.dim();
    j["epsilon"] = eps;

    const auto act = epsilon_activity(config, eps);
    j["activity"]["active"] = act.active;
    if (act.witness) j["activity"]["witness"] = {act.witness->i + 1, act.witness->j + 1};

    if (!act.active && eps <= kClusterEps) {
        try {
            const auto part = cluster_partition(config, eps);
            json clusters = json::array();
            for (const auto& cluster : part.clusters) {
                json members = json::array();
                for (std::size_t i : cluster) members.push_back(i + 1);
                clusters.push_back(members);
            }
            j["clusters"] = clusters;
        } catch (const SimError& e) {
            j["clusters"] = nullptr;
            j["clusters_error"] = e.what();
        }
    } else {
        j["clusters"] = nullptr;
    }

    const auto convex = strict_convexity(config);
    j["strictly_convex"]["certified"] = convex.certified;
    if (convex.assignment) {
        j["strictly_convex"]["signs"] = convex.assignment->signs;
        j["strictly_convex"]["margin"] = convex.assignment->margin;
    }

    const auto sep = separability(config);
    j["separable"]["verdict"] = sep.separable;
    if (sep.separable) {
        json s = json::array(), t = json::array();
        for (std::size_t i : sep.s) s.push_back(i + 1);
        for (std::size_t i : sep.t) t.push_back(i + 1);
        j["separable"]["s"] = s;
        j["separable"]["t"] = t;
    }

    const auto polar = polarization_check(config);
    j["polarized"]["verdict"] = polar.polarized;
    j["polarized"]["group_sizes"] = {polar.group_sizes[0], polar.group_sizes[1]};

    j["potential_min_corr"] = potential_min_corr(config);
    if (config.size() == 3) j["potential_triangle"] = potential_triangle(config);

    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded simulator for geometric opinion dynamics on the unit sphere"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run one seeded trajectory");
    std::string update = "linear:eta=0.1";
    std::size_t n = 10, d = 3;
    std::uint64_t steps = 1000000, seed = 1, metric_every = 100;
    std::string init = "uniform", stop = "polarized:1e-6", trace_path, summary_path;
    sim->add_option("--update", update, "Update rule, e.g. linear:eta=0.1");
    sim->add_option("--n", n, "Agent count")->required();
    sim->add_option("--d", d, "Dimension")->required();
    sim->add_option("--steps", steps, "Maximum steps");
    sim->add_option("--seed", seed, "Seed");
    sim->add_option("--init", init, "uniform | file:<path> | almost-orth:<low>,<high>");
    sim->add_option("--stop", stop, "polarized:<tol> | inactive:<eps> | steps");
    sim->add_option("--metric-every", metric_every, "Metric record cadence");
    sim->add_option("--trace", trace_path, "Trace CSV output path");
    sim->add_option("--summary", summary_path, "Summary JSON output path");

    auto* exp = app.add_subcommand("experiment", "Run a replicated experiment");
    std::string preset, config_path, out_dir = ".";
    std::size_t replicas = 0;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;
    exp->add_option("--preset", preset, "figure1 | figure2 | concentration | counterexample");
    exp->add_option("--config", config_path, "Experiment spec JSON file");
    exp->add_option("--replicas", replicas, "Replica count override");
    auto* seed_opt = exp->add_option("--seed", master_seed, "Master seed");
    exp->add_option("--out", out_dir, "Output directory")->required();
    exp->add_option("--threads", threads, "Worker threads (0 = hardware)");

    auto* ana = app.add_subcommand("analyze", "Analyze an opinion file");
    std::string analyze_path;
    double eps = kClusterEps;
    ana->add_option("--config", analyze_path, "Opinion file (one opinion per line)")->required();
    ana->add_option("--epsilon", eps, "Activity/cluster epsilon");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(n, d, update, steps, seed, init, stop, metric_every, trace_path,
                                summary_path);
        if (exp->parsed())
            return cmd_experiment(preset, config_path, replicas, master_seed, !seed_opt->empty(),
                                  out_dir, threads);
        if (ana->parsed()) return cmd_analyze(analyze_path, eps);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
