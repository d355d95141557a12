#include <benchmark/benchmark.h>

#include "fortifynet/kshortest.hpp"
#include "fortifynet/measures.hpp"
#include "fortifynet/network.hpp"
#include "fortifynet/scenario.hpp"
#include "fortifynet/solver_bridge.hpp"
#include "fortifynet/stochastic.hpp"

using namespace fortifynet;

namespace {

struct Fixture {
    Network net;
    DemandTable demand;
    FortificationParams fort;
    RouteSet routes;
    ScenarioSet catalog;

    Fixture() {
        const std::string dir = std::string(FORTIFYNET_BENCH_DATA_DIR) + "/sioux_falls/";
        net = parse_tntp(read_file(dir + "SiouxFalls_net.tntp"));
        demand = load_demand(read_file(dir + "demand.csv"), 100.0);
        fort = parse_fortification(read_file(dir + "fortification.json"));
        routes = build_route_sets(net, demand, unit_weights(net), 10);
        catalog = builtin_catalog();
    }

    ModelInput input() const {
        ModelInput in{net, demand, routes, &catalog, &fort, {}, {}, {}};
        in.weights.z_normalizer = max_free_flow_route_time(net, routes);
        in.weights.demand_normalizer = demand.total();
        return in;
    }
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

void BM_KShortest(benchmark::State& state) {
    const auto& f = fx();
    const LinkWeights w = free_flow_weights(f.net);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_route_sets(f.net, f.demand, w, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_KShortest)->Arg(1)->Arg(10)->Arg(50);

void BM_AllMeasures(benchmark::State& state) {
    const auto& f = fx();
    for (auto _ : state)
        for (MeasureKind k : all_measures()) benchmark::DoNotOptimize(compute_measure(f.net, f.demand, k));
}
BENCHMARK(BM_AllMeasures)->Unit(benchmark::kMillisecond);

void BM_BuildModel(benchmark::State& state) {
    const auto& f = fx();
    const auto kind = static_cast<ModelKind>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_model(kind, f.input()));
}
BENCHMARK(BM_BuildModel)
    ->Arg(static_cast<int>(ModelKind::RiskNeutral))
    ->Arg(static_cast<int>(ModelKind::Hybrid))
    ->Unit(benchmark::kMillisecond);

void BM_WriteLp(benchmark::State& state) {
    const BuiltModel b = build_rn(fx().input());
    for (auto _ : state) benchmark::DoNotOptimize(write_lp(b.model));
}
BENCHMARK(BM_WriteLp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
