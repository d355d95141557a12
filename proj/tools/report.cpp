#include "report.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "fortifynet/error.hpp"
#include "json.hpp"

#ifndef FORTIFYNET_DATA_DIR
#define FORTIFYNET_DATA_DIR ""
#endif

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace fortifynet::report {

std::string bundled_data_dir() {
    if (const char* env = std::getenv("FORTIFYNET_DATA"); env && *env) return env;
    return FORTIFYNET_DATA_DIR;
}

RunSpec default_spec() {
    RunSpec s;
    const fs::path d = fs::path(bundled_data_dir()) / "sioux_falls";
    s.net_path = (d / "SiouxFalls_net.tntp").string();
    s.demand_path = (d / "demand.csv").string();
    s.fort_path = (d / "fortification.json").string();
    const std::string exe = default_solver_executable();
    if (!exe.empty()) s.solver = solver_config_for(exe);
    return s;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
    std::string out;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        out += buf;
    }
    return out;
}

Network load_network(const std::string& path) { return parse_tntp(read_file(path)); }

Case load_case(const RunSpec& spec) {
    std::map<std::string, std::string> dig;
    auto slurp = [&](const std::string& p) {
        std::string t = read_file(p);
        dig[p] = sha256_hex(t);
        return t;
    };
    Network net = parse_tntp(slurp(spec.net_path));
    DemandTable demand = load_demand(slurp(spec.demand_path), spec.demand_scale);
    for (const auto& f : validate(net, demand))
        if (f.severity == Severity::Error) throw ValidationError(f.message);
    FortificationParams fort = parse_fortification(slurp(spec.fort_path));
    if (spec.budget) fort.budget = *spec.budget;
    check_fortification(net, fort);
    const LinkWeights w = spec.route_weighting == RouteWeighting::Hops ? unit_weights(net) : free_flow_weights(net);
    RouteSet routes = build_route_sets(net, demand, w, spec.k);
    ScenarioSet scen;
    switch (spec.scenario_source) {
        case ScenarioSource::Builtin: scen = builtin_catalog(); break;
        case ScenarioSource::File: scen = normalize_probabilities(scenarios_from_json(slurp(spec.scenario_path))); break;
        case ScenarioSource::Generate: {
            std::vector<MeasureVector> mv;
            const MeasureOptions mo = measure_options(demand, spec.bc_all_pairs);
            for (MeasureKind k : all_measures()) mv.push_back(compute_measure(net, demand, k, mo));
            scen = generate_from_measures(mv, spec.generate_top_m, spec.generate_rates,
                                          {{MeasureCategory::Connectivity, 1.0},
                                           {MeasureCategory::Accessibility, 1.0},
                                           {MeasureCategory::Criticality, 1.0}});
            break;
        }
    }
    validate_scenarios(scen, &net);
    return Case{std::move(net), std::move(demand), std::move(fort), std::move(routes), std::move(scen), std::move(dig)};
}

ModelInput make_input(const Case& c, const RunSpec& spec, ModelKind kind, double z_normalizer) {
    ModelInput in{c.net, c.demand, c.routes, nullptr, nullptr, {}, {}, {}};
    if (kind != ModelKind::Baseline) {
        in.scenarios = &c.scenarios;
        in.fort = &c.fort;
    }
    in.weights = spec.weights;
    in.weights.z_normalizer = z_normalizer;
    in.weights.demand_normalizer = c.demand.total() > 0 ? c.demand.total() : 1.0;
    double cmax = 0;
    for (const auto& [n, v] : c.fort.cost) cmax = std::max(cmax, v);
    in.weights.cost_normalizer = cmax > 0 ? cmax : 1.0;
    in.risk = spec.risk;
    in.options.pla_segments = spec.pla_segments;
    in.options.encoding = spec.encoding;
    return in;
}

RunResult run_model(const Case& c, const RunSpec& spec, ModelKind kind, double z_normalizer) {
    const ModelInput in = make_input(c, spec, kind, z_normalizer);
    RunResult r;
    r.kind = kind;
    r.delta = spec.risk.delta;
    const auto t0 = std::chrono::steady_clock::now();
    r.built = build_model(kind, in);
    r.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.raw = solve(r.built.model, spec.solver);
    r.sol = extract_solution(r.built, r.raw, in);
    return r;
}

double baseline_z(const Case& c, const RunSpec& spec) {
    const double zff = max_free_flow_route_time(c.net, c.routes);
    const RunResult r = run_model(c, spec, ModelKind::Baseline, zff > 0 ? zff : 1.0);
    if (r.sol.status != SolveStatus::Optimal && r.sol.status != SolveStatus::Feasible)
        throw SolverError("baseline solve failed with status " + status_name(r.sol.status));
    return r.sol.scenarios.at(0).z > 0 ? r.sol.scenarios.at(0).z : 1.0;
}

double expected_undelivered(const Solution& sol) {
    double e = 0;
    for (const auto& s : sol.scenarios) e += s.probability * s.relative_undelivered;
    return e;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error("cannot write " + path.string());
}

MeasureOptions measure_options(const DemandTable& demand, bool all_pairs) {
    MeasureOptions o;
    if (!all_pairs)
        for (const auto& e : demand.entries()) o.od_pairs.emplace_back(e.origin, e.destination);
    return o;
}

void write_measures(const Network& net, const DemandTable& demand, const std::vector<MeasureKind>& kinds,
                    std::size_t top_m, const MeasureOptions& opts, const fs::path& dir) {
    std::vector<MeasureVector> mv;
    for (MeasureKind k : kinds) mv.push_back(compute_measure(net, demand, k, opts));
    std::string m = "node";
    for (MeasureKind k : kinds) m += "," + measure_name(k);
    m += "\r\n";
    for (NodeId n : net.nodes()) {
        m += std::to_string(n);
        for (const auto& v : mv) {
            m += ',';
            auto it = v.values.find(n);
            if (it != v.values.end() && it->second) m += num(*it->second);
        }
        m += "\r\n";
    }
    write_text(dir / "measures.csv", m);
    std::string lg = "measure,node,value,category\r\n";
    for (const auto& v : mv)
        for (const auto& [n, val] : v.values)
            lg += measure_name(v.kind) + "," + std::to_string(n) + "," + (val ? num(*val) : "") + "," +
                  category_name(category_of(v.kind)) + "\r\n";
    write_text(dir / "measures_long.csv", lg);
    std::string r = "measure,category,rank,node,value\r\n";
    const std::size_t m_eff = std::min(top_m, net.node_count());
    for (const auto& v : mv) {
        const auto ranked = rank_nodes(v, m_eff);
        for (std::size_t i = 0; i < ranked.size(); ++i)
            r += measure_name(v.kind) + "," + category_name(category_of(v.kind)) + "," + std::to_string(i + 1) + "," +
                 std::to_string(ranked[i].first) + "," + (ranked[i].second ? num(*ranked[i].second) : "") + "\r\n";
    }
    write_text(dir / "rankings.csv", r);
    std::string w;
    for (const auto& v : mv)
        for (const auto& msg : v.warnings) w += measure_name(v.kind) + ": " + msg + "\n";
    if (!w.empty()) write_text(dir / "warnings.txt", w);
}

void write_routes(const Network& net, const RouteSet& routes, const fs::path& dir) {
    write_text(dir / "routes.json", routes.to_json() + "\n");
    std::string s = "origin,destination,route,hops,free_flow_time,nodes\r\n";
    for (const auto& p : routes.pairs())
        for (std::size_t r = 0; r < p.routes.size(); ++r) {
            const Path& path = p.routes[r];
            double t = 0;
            for (int l : path.links) t += net.link(l).free_flow_time;
            std::string nodes;
            for (NodeId n : path.nodes) nodes += (nodes.empty() ? "" : " ") + std::to_string(n);
            s += std::to_string(p.origin) + "," + std::to_string(p.destination) + "," + std::to_string(r + 1) + "," +
                 std::to_string(path.links.size()) + "," + num(t) + "," + nodes + "\r\n";
        }
    write_text(dir / "routes.csv", s);
}

std::map<OdKey, double> od_max_route_times(const Case& c, const ScenarioResult& s) {
    std::map<OdKey, double> out;
    for (const auto& e : c.demand.entries()) {
        const OdRoutes* odr = c.routes.find(e.origin, e.destination);
        double mx = 0;
        for (std::size_t r = 0; r < odr->routes.size(); ++r) {
            auto it = s.route_time.find({e.origin, e.destination, static_cast<int>(r) + 1});
            if (it != s.route_time.end()) mx = std::max(mx, it->second);
        }
        out[{e.origin, e.destination}] = mx;
    }
    return out;
}

int exit_code_for(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal:
        case SolveStatus::Feasible: return 0;
        case SolveStatus::Infeasible:
        case SolveStatus::Unbounded: return 2;
        case SolveStatus::Error: return 3;
    }
    return 3;
}

void write_solve_outputs(const Case& c, const RunSpec& spec, const RunResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    const Solution& sol = r.sol;
    const bool ok = sol.status == SolveStatus::Optimal || sol.status == SolveStatus::Feasible;

    ojson rep;
    rep["model"] = model_name(r.kind);
    rep["status"] = status_name(sol.status);
    if (ok) {
        rep["objective"] = sol.objective;
        rep["objective_recomputed"] = sol.objective_recomputed;
        rep["gap"] = sol.gap ? ojson(*sol.gap) : ojson(nullptr);
        rep["fortified"] = std::vector<int>(sol.fortified.begin(), sol.fortified.end());
        rep["expected_relative_undelivered"] = expected_undelivered(sol);
        ojson scen = ojson::array();
        for (const auto& s : sol.scenarios)
            scen.push_back({{"id", s.id},
                            {"probability", s.probability},
                            {"relative_undelivered", s.relative_undelivered},
                            {"total_travel_time", s.total_travel_time},
                            {"z", s.z}});
        rep["scenarios"] = scen;
        rep["violations"] = sol.violations;
    }
    rep["warnings"] = r.built.warnings;
    rep["parameters"] = {{"demand_scale", spec.demand_scale},
                         {"k", spec.k},
                         {"route_weighting", spec.route_weighting == RouteWeighting::Hops ? "hops" : "free-flow"},
                         {"pla_segments", spec.pla_segments},
                         {"pla_encoding", spec.encoding == PlaEncoding::ConvexHull ? "convex-hull" : "sos2-binary"},
                         {"budget", c.fort.budget},
                         {"w1", spec.weights.w1},
                         {"w2", spec.weights.w2},
                         {"w3", spec.weights.w3},
                         {"z_normalizer", r.built.weights.z_normalizer},
                         {"demand_normalizer", r.built.weights.demand_normalizer},
                         {"cost_normalizer", r.built.weights.cost_normalizer},
                         {"epsilon", spec.risk.epsilon},
                         {"delta", spec.risk.delta},
                         {"gap_tolerance", spec.solver.gap_tolerance},
                         {"time_limit", spec.solver.time_limit}};
    ojson inputs = ojson::object();
    for (const auto& [p, d] : c.digests) inputs[p] = d;
    rep["inputs"] = inputs;
    const std::time_t now = std::time(nullptr);
    char ts[32];
    std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    rep["metadata"] = {{"timestamp", ts},
                       {"solver", spec.solver.executable},
                       {"solve_seconds", r.raw.seconds},
                       {"build_seconds", r.build_seconds},
                       {"variables", r.built.model.variables().size()},
                       {"constraints", r.built.model.constraints().size()},
                       {"binaries", r.built.model.binary_count()}};
    write_text(dir / "report.json", rep.dump(2) + "\n");

    if (spec.write_lp) {
        const std::string lp = write_lp(r.built.model);
        write_text(dir / "model.lp", lp);
        ojson man = {{"model", model_name(r.kind)},
                     {"sha256", sha256_hex(lp)},
                     {"variables", r.built.model.variables().size()},
                     {"constraints", r.built.model.constraints().size()},
                     {"binaries", r.built.model.binary_count()},
                     {"scenario_keys", r.built.scenario_keys},
                     {"weights",
                      {{"w1", r.built.weights.w1},
                       {"w2", r.built.weights.w2},
                       {"w3", r.built.weights.w3},
                       {"z_normalizer", r.built.weights.z_normalizer},
                       {"demand_normalizer", r.built.weights.demand_normalizer},
                       {"cost_normalizer", r.built.weights.cost_normalizer}}},
                     {"risk", {{"epsilon", r.built.risk.epsilon}, {"delta", r.built.risk.delta}}},
                     {"bpr", {{"alpha", r.built.bpr.alpha}, {"beta", r.built.bpr.beta}}},
                     {"inputs", inputs}};
        write_text(dir / "model.manifest.json", man.dump(2) + "\n");
    }
    if (!ok) return;

    std::string st = "scenario,probability,relative_undelivered,total_travel_time,z\r\n";
    std::string pu = "scenario,relative_undelivered\r\n", pt = "scenario,total_travel_time\r\n";
    std::string rf = "scenario,origin,destination,route,flow,route_time\r\n";
    std::string ud = "scenario,origin,destination,demand,undelivered\r\n";
    for (const auto& s : sol.scenarios) {
        const std::string id = csv_field(s.id);
        st += id + "," + num(s.probability) + "," + num(s.relative_undelivered) + "," + num(s.total_travel_time) + "," +
              num(s.z) + "\r\n";
        pu += id + "," + num(s.relative_undelivered) + "\r\n";
        pt += id + "," + num(s.total_travel_time) + "\r\n";
        for (const auto& [k, f] : s.route_flow) {
            const auto& [o, d, ri] = k;
            rf += id + "," + std::to_string(o) + "," + std::to_string(d) + "," + std::to_string(ri) + "," + num(f) + "," +
                  num(s.route_time.at(k)) + "\r\n";
        }
        for (const auto& e : c.demand.entries())
            ud += id + "," + std::to_string(e.origin) + "," + std::to_string(e.destination) + "," + num(e.effective) +
                  "," + num(s.undelivered.at({e.origin, e.destination})) + "\r\n";
    }
    write_text(dir / "scenario_table.csv", st);
    write_text(dir / "plot_undelivered.csv", pu);
    write_text(dir / "plot_travel_time.csv", pt);
    write_text(dir / "route_flows.csv", rf);
    write_text(dir / "undelivered.csv", ud);

    std::string fo = "node\r\n";
    for (NodeId n : sol.fortified) fo += std::to_string(n) + "\r\n";
    write_text(dir / "fortified.csv", fo);

    std::string om = "scenario,origin,destination,max_route_time\r\n";
    for (const auto& s : sol.scenarios)
        for (const auto& [od, t] : od_max_route_times(c, s))
            om += csv_field(s.id) + "," + std::to_string(od.first) + "," + std::to_string(od.second) + "," + num(t) +
                  "\r\n";
    write_text(dir / "od_max_times.csv", om);
}

}  // namespace fortifynet::report
