#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "CLI11.hpp"
#include "fortifynet/error.hpp"
#include "report.hpp"

namespace fs = std::filesystem;
using namespace fortifynet;
using namespace fortifynet::report;

namespace {

constexpr int kExitInput = 4;
constexpr int kExitSolver = 3;

struct Flags {
    RunSpec spec = default_spec();
    std::string scenarios = "builtin";
    std::string model = "rn";
    std::string route_weights = "hops";
    std::string encoding = "convex-hull";
    std::string solver;
    std::string dialect;
    int nf = -1;
    double time_limit = 600;
    double gap = 1e-6;
    bool keep = false;
    std::vector<std::string> measures;
    std::size_t top_m = 5;
    std::vector<double> deltas{0.3, 0.6, 0.9};
    int jobs = 1;
};

void add_input_flags(CLI::App* app, Flags& f) {
    app->add_option("--net", f.spec.net_path, "TNTP network file")->capture_default_str();
    app->add_option("--demand", f.spec.demand_path, "OD demand CSV")->capture_default_str();
    app->add_option("--demand-scale", f.spec.demand_scale, "multiplier applied to raw demand")->capture_default_str();
    app->add_option("--k", f.spec.k, "routes per OD pair")->capture_default_str();
    app->add_option("--route-weights", f.route_weights, "hops | free-flow")->capture_default_str();
    app->add_option("--out", f.spec.out_dir, "output directory")->capture_default_str();
}

void add_scenario_flags(CLI::App* app, Flags& f) {
    app->add_option("--scenarios", f.scenarios, "builtin | generate | path to scenario JSON")->capture_default_str();
    app->add_option("--top-m", f.spec.generate_top_m, "nodes per generated scenario")->capture_default_str();
    app->add_option("--rates", f.spec.generate_rates, "disruption rates by rank for generated scenarios")
        ->capture_default_str();
    app->add_flag("--bc-all-pairs", f.spec.bc_all_pairs, "betweenness over all node pairs when generating");
}

void add_model_flags(CLI::App* app, Flags& f) {
    add_input_flags(app, f);
    add_scenario_flags(app, f);
    app->add_option("--fort", f.spec.fort_path, "fortification costs and budget JSON")->capture_default_str();
    app->add_option("--nf", f.nf, "fortification budget override");
    app->add_option("--pla-n", f.spec.pla_segments, "PLA segments")->capture_default_str();
    app->add_option("--pla-encoding", f.encoding, "convex-hull | sos2-binary")->capture_default_str();
    app->add_option("--w1", f.spec.weights.w1, "weight of maximum travel time")->capture_default_str();
    app->add_option("--w2", f.spec.weights.w2, "weight of undelivered demand")->capture_default_str();
    app->add_option("--w3", f.spec.weights.w3, "weight of fortification cost")->capture_default_str();
    app->add_option("--epsilon", f.spec.risk.epsilon, "CVaR tail mass")->capture_default_str();
    app->add_option("--delta", f.spec.risk.delta, "risk-averse share of the hybrid objective")->capture_default_str();
    app->add_option("--solver", f.solver, "solver executable (default: FORTIFYNET_SOLVER or build default)");
    app->add_option("--dialect", f.dialect, "solution dialect: highs | cbc | name-value | cplex-xml");
    app->add_option("--time-limit", f.time_limit, "solver time limit in seconds")->capture_default_str();
    app->add_option("--gap", f.gap, "relative MIP gap tolerance")->capture_default_str();
    app->add_flag("--keep-artifacts", f.keep, "keep solver temp files");
    app->add_flag("--write-lp", f.spec.write_lp, "write model.lp and a manifest next to the report");
}

void finalize(Flags& f) {
    if (f.route_weights == "hops")
        f.spec.route_weighting = RouteWeighting::Hops;
    else if (f.route_weights == "free-flow")
        f.spec.route_weighting = RouteWeighting::FreeFlow;
    else
        throw ValidationError("unknown route weighting '" + f.route_weights + "'");
    if (f.scenarios == "builtin") {
        f.spec.scenario_source = ScenarioSource::Builtin;
    } else if (f.scenarios == "generate") {
        f.spec.scenario_source = ScenarioSource::Generate;
    } else {
        f.spec.scenario_source = ScenarioSource::File;
        f.spec.scenario_path = f.scenarios;
    }
    if (f.encoding == "convex-hull")
        f.spec.encoding = PlaEncoding::ConvexHull;
    else if (f.encoding == "sos2-binary")
        f.spec.encoding = PlaEncoding::Sos2Binary;
    else
        throw ValidationError("unknown PLA encoding '" + f.encoding + "'");
    if (f.nf >= 0) f.spec.budget = f.nf;
    const auto m = parse_model(f.model);
    if (!m) throw ValidationError("unknown model '" + f.model + "'");
    f.spec.model = *m;
    const std::string exe = f.solver.empty() ? default_solver_executable() : f.solver;
    if (!exe.empty()) f.spec.solver = solver_config_for(exe);
    if (!f.dialect.empty()) {
        const auto d = parse_dialect(f.dialect);
        if (!d) throw ValidationError("unknown dialect '" + f.dialect + "'");
        f.spec.solver.dialect = *d;
    }
    f.spec.solver.time_limit = f.time_limit;
    f.spec.solver.gap_tolerance = f.gap;
    f.spec.solver.keep_artifacts = f.keep;
    if (f.keep) f.spec.solver.work_dir = (fs::path(f.spec.out_dir) / "artifacts").string();
}

int cmd_measures(Flags& f) {
    finalize(f);
    const Network net = load_network(f.spec.net_path);
    const DemandTable demand = load_demand(read_file(f.spec.demand_path), f.spec.demand_scale);
    std::vector<MeasureKind> kinds;
    if (f.measures.empty()) {
        kinds.assign(all_measures().begin(), all_measures().end());
    } else {
        for (const auto& n : f.measures) {
            const auto k = parse_measure(n);
            if (!k) throw ValidationError("unknown measure '" + n + "'");
            kinds.push_back(*k);
        }
    }
    write_measures(net, demand, kinds, f.top_m, measure_options(demand, f.spec.bc_all_pairs), f.spec.out_dir);
    std::printf("wrote %s/measures.csv and rankings.csv (%zu nodes, %zu measures)\n", f.spec.out_dir.c_str(),
                net.node_count(), kinds.size());
    return 0;
}

int cmd_routes(Flags& f) {
    finalize(f);
    const Network net = load_network(f.spec.net_path);
    const DemandTable demand = load_demand(read_file(f.spec.demand_path), f.spec.demand_scale);
    const LinkWeights w = f.spec.route_weighting == RouteWeighting::Hops ? unit_weights(net) : free_flow_weights(net);
    const RouteSet rs = build_route_sets(net, demand, w, f.spec.k);
    write_routes(net, rs, f.spec.out_dir);
    std::printf("wrote %zu routes for %zu OD pairs to %s\n", rs.route_count(), rs.pairs().size(),
                f.spec.out_dir.c_str());
    return 0;
}

int cmd_scenarios(Flags& f) {
    finalize(f);
    const Case c = load_case(f.spec);
    write_text(fs::path(f.spec.out_dir) / "scenarios.json", scenarios_to_json(c.scenarios) + "\n");
    std::printf("wrote %zu scenarios (probability sum %.12g)\n", c.scenarios.scenarios.size(),
                c.scenarios.probability_sum());
    return 0;
}

void print_summary(const RunResult& r) {
    std::printf("%s: status %s", model_name(r.kind).c_str(), status_name(r.sol.status).c_str());
    if (r.sol.status == SolveStatus::Optimal || r.sol.status == SolveStatus::Feasible) {
        std::printf(", objective %.9g, gap %s, fortified {", r.sol.objective,
                    r.sol.gap ? num(*r.sol.gap).c_str() : "unknown");
        bool first = true;
        for (NodeId n : r.sol.fortified) {
            std::printf(first ? "%d" : ", %d", n);
            first = false;
        }
        std::printf("}, expected relative undelivered %.6g", expected_undelivered(r.sol));
    }
    std::printf(", %.2fs\n", r.raw.seconds);
    for (const auto& v : r.sol.violations) std::fprintf(stderr, "violation: %s\n", v.c_str());
}

int cmd_solve(Flags& f) {
    finalize(f);
    const Case c = load_case(f.spec);
    const double zn = f.spec.model == ModelKind::Baseline ? std::max(max_free_flow_route_time(c.net, c.routes), 1e-9)
                                                           : baseline_z(c, f.spec);
    const RunResult r = run_model(c, f.spec, f.spec.model, zn);
    write_solve_outputs(c, f.spec, r, f.spec.out_dir);
    print_summary(r);
    return exit_code_for(r.sol.status);
}

int cmd_sweep(Flags& f) {
    finalize(f);
    if (f.deltas.empty()) throw ValidationError("sweep needs at least one delta");
    const Case c = load_case(f.spec);
    const double zn = baseline_z(c, f.spec);

    struct Job {
        std::string label;
        ModelKind kind;
        double delta;
        std::optional<RunResult> result;
        std::string error;
    };
    std::vector<Job> jobs;
    jobs.push_back({"rn", ModelKind::RiskNeutral, 0.0, {}, {}});
    jobs.push_back({"ra", ModelKind::RiskAverse, 1.0, {}, {}});
    for (double d : f.deltas) jobs.push_back({"rnra", ModelKind::Hybrid, d, {}, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next++) < jobs.size();) {
            Job& j = jobs[i];
            RunSpec s = f.spec;
            s.risk.delta = j.delta;
            try {
                j.result = run_model(c, s, j.kind, zn);
            } catch (const std::exception& e) {
                j.error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int n = std::max(1, std::min<int>(f.jobs, static_cast<int>(jobs.size())));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::string sweep = "delta,scenario,probability,relative_undelivered,total_travel_time,z\r\n";
    std::string summary = "strategy,delta,status,objective,expected_relative_undelivered,mean_relative_undelivered,fortified\r\n";
    int code = 0;
    for (const Job& j : jobs) {
        const std::string label = j.kind == ModelKind::Hybrid ? "rnra" : j.label;
        const std::string dstr = j.kind == ModelKind::Hybrid ? num(j.delta) : "";
        if (!j.result) {
            summary += label + "," + dstr + ",error,,,," + csv_field(j.error) + "\r\n";
            std::fprintf(stderr, "%s delta=%s failed: %s\n", label.c_str(), dstr.c_str(), j.error.c_str());
            code = kExitSolver;
            continue;
        }
        const RunResult& r = *j.result;
        const bool ok = r.sol.status == SolveStatus::Optimal || r.sol.status == SolveStatus::Feasible;
        if (!ok) code = std::max(code, exit_code_for(r.sol.status));
        std::string fort;
        for (NodeId n : r.sol.fortified) fort += (fort.empty() ? "" : " ") + std::to_string(n);
        double mean = 0;
        for (const auto& s : r.sol.scenarios) mean += s.relative_undelivered;
        if (!r.sol.scenarios.empty()) mean /= static_cast<double>(r.sol.scenarios.size());
        summary += label + "," + dstr + "," + status_name(r.sol.status) + "," + (ok ? num(r.sol.objective) : "") + "," +
                   (ok ? num(expected_undelivered(r.sol)) : "") + "," + (ok ? num(mean) : "") + "," + fort + "\r\n";
        if (j.kind == ModelKind::Hybrid && ok)
            for (const auto& s : r.sol.scenarios)
                sweep += num(j.delta) + "," + csv_field(s.id) + "," + num(s.probability) + "," +
                         num(s.relative_undelivered) + "," + num(s.total_travel_time) + "," + num(s.z) + "\r\n";
        RunSpec s = f.spec;
        s.risk.delta = j.delta;
        const std::string sub = j.kind == ModelKind::Hybrid ? "rnra_delta_" + num(j.delta) : label;
        write_solve_outputs(c, s, r, fs::path(f.spec.out_dir) / sub);
        print_summary(r);
    }
    write_text(fs::path(f.spec.out_dir) / "sweep.csv", sweep);
    write_text(fs::path(f.spec.out_dir) / "summary.csv", summary);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Node vulnerability measures, disruption scenarios and stochastic fortification models"};
    app.require_subcommand(1);
    Flags f;

    auto* measures = app.add_subcommand("measures", "compute the vulnerability measure matrix and rankings");
    add_input_flags(measures, f);
    measures->add_option("--measures", f.measures, "restrict to these measures");
    measures->add_option("--top-m", f.top_m, "ranking depth")->capture_default_str();
    measures->add_flag("--bc-all-pairs", f.spec.bc_all_pairs, "betweenness over all node pairs instead of OD pairs");

    auto* routes = app.add_subcommand("routes", "enumerate K shortest loopless routes per OD pair");
    add_input_flags(routes, f);

    auto* scenarios = app.add_subcommand("scenarios", "write the scenario set as JSON");
    add_input_flags(scenarios, f);
    add_scenario_flags(scenarios, f);
    scenarios->add_option("--fort", f.spec.fort_path, "fortification costs and budget JSON")->capture_default_str();

    auto* solve_cmd = app.add_subcommand("solve", "build, solve and report one model");
    add_model_flags(solve_cmd, f);
    solve_cmd->add_option("--model", f.model, "baseline | rn | ra | rnra")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "solve rn, ra and rnra over a list of deltas");
    add_model_flags(sweep, f);
    sweep->add_option("--deltas", f.deltas, "hybrid deltas")->capture_default_str();
    sweep->add_option("--jobs", f.jobs, "concurrent solves")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitInput;
    }

    try {
        if (*measures) return cmd_measures(f);
        if (*routes) return cmd_routes(f);
        if (*scenarios) return cmd_scenarios(f);
        if (*solve_cmd) return cmd_solve(f);
        if (*sweep) return cmd_sweep(f);
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return 0;
}
