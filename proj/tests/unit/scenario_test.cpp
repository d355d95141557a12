#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "fortifynet/error.hpp"
#include "fortifynet/scenario.hpp"
#include "json.hpp"

using namespace fortifynet;
using namespace fortifynet::testing;

TEST(Catalog, MatchesGolden) {
    std::ifstream f(golden_path("catalog.json"));
    const auto golden = nlohmann::json::parse(f);
    const ScenarioSet cat = builtin_catalog();
    ASSERT_EQ(cat.scenarios.size(), golden.size());
    for (std::size_t i = 0; i < golden.size(); ++i) {
        const Scenario& s = cat.scenarios[i];
        EXPECT_EQ(s.id, golden[i]["id"].get<std::string>());
        std::map<NodeId, double> want;
        for (const auto& p : golden[i]["affected"]) want[p[0].get<int>()] = p[1].get<double>();
        EXPECT_EQ(s.affected, want) << s.id;
        EXPECT_EQ(s.probability, golden[i]["probability"].get<double>()) << s.id;
    }
    EXPECT_NEAR(cat.probability_sum(), 1.0, 1e-9);
}

TEST(Catalog, FirstAndLastRows) {
    const ScenarioSet cat = builtin_catalog();
    const Scenario& first = cat.scenarios.front();
    EXPECT_EQ(first.source_measure, MeasureKind::NeighborhoodConnectivity);
    EXPECT_EQ(first.affected.size(), 8u);
    EXPECT_DOUBLE_EQ(first.affected.at(9), 0.70);
    EXPECT_DOUBLE_EQ(first.affected.at(10), 0.65);
    EXPECT_DOUBLE_EQ(first.probability, 0.08);
    EXPECT_TRUE(first.high_risk());
    const Scenario& last = cat.scenarios.back();
    EXPECT_EQ(last.id, "xi_27");
    EXPECT_EQ(last.source_measure, MeasureKind::ComplexityMeasureDistribution);
    EXPECT_DOUBLE_EQ(last.probability, 0.01);
    EXPECT_FALSE(last.high_risk());
}

TEST(Catalog, DuplicateFlaggedAndValid) {
    const ScenarioSet cat = builtin_catalog();
    EXPECT_EQ(cat.find("xi_11")->duplicate_of, std::optional<std::string>("xi_10"));
    EXPECT_NO_THROW(validate_scenarios(cat, &sioux_falls()));
    for (const auto& s : cat.scenarios) EXPECT_DOUBLE_EQ(s.mitigation(1), 0.5);
}

TEST(Catalog, JsonRoundTrip) {
    const ScenarioSet cat = builtin_catalog();
    const std::string text = scenarios_to_json(cat);
    const ScenarioSet back = scenarios_from_json(text);
    ASSERT_EQ(back.scenarios.size(), cat.scenarios.size());
    for (std::size_t i = 0; i < cat.scenarios.size(); ++i) {
        EXPECT_EQ(back.scenarios[i].affected, cat.scenarios[i].affected);
        EXPECT_EQ(back.scenarios[i].probability, cat.scenarios[i].probability);
        EXPECT_EQ(back.scenarios[i].source_measure, cat.scenarios[i].source_measure);
        EXPECT_EQ(back.scenarios[i].duplicate_of, cat.scenarios[i].duplicate_of);
    }
    EXPECT_EQ(scenarios_to_json(back), text);
}

TEST(ScenarioJson, SpecLayoutAndErrors) {
    const auto s = scenarios_from_json(
        R"([{"id":"xi_1","measure":"NeighborhoodConnectivity","affected":{"9":0.7},"gamma_default":0.25,"probability":1}])");
    ASSERT_EQ(s.scenarios.size(), 1u);
    EXPECT_DOUBLE_EQ(s.scenarios[0].affected.at(9), 0.7);
    EXPECT_DOUBLE_EQ(s.scenarios[0].mitigation(3), 0.25);
    EXPECT_THROW(scenarios_from_json("{}"), ParseError);
    EXPECT_THROW(scenarios_from_json(R"([{"id":"a","measure":"Nope","affected":{"1":0.5},"probability":1}])"),
                 ParseError);
}

TEST(ScenarioValidation, Rejects) {
    ScenarioSet s;
    s.scenarios.push_back({"a", MeasureKind::DegreeCentrality, {{1, 1.2}}, 0.5, {}, 1.0, {}});
    EXPECT_THROW(validate_scenarios(s), ValidationError);
    s.scenarios[0].affected = {{99, 0.5}};
    EXPECT_THROW(validate_scenarios(s, &sioux_falls()), ValidationError);
    s.scenarios[0].affected = {{1, 0.5}};
    s.scenarios.push_back(s.scenarios[0]);
    EXPECT_THROW(validate_scenarios(s), ValidationError);
    s.scenarios.pop_back();
    s.scenarios[0].affected.clear();
    EXPECT_THROW(validate_scenarios(s), ValidationError);
}

TEST(Normalize, Arithmetic) {
    ScenarioSet s;
    s.scenarios.push_back({"a", MeasureKind::DegreeCentrality, {{1, 0.5}}, 0.5, {}, 0.08, {}});
    s.scenarios.push_back({"b", MeasureKind::DegreeCentrality, {{2, 0.5}}, 0.5, {}, 0.02, {}});
    const auto n = normalize_probabilities(s);
    EXPECT_NEAR(n.scenarios[0].probability, 0.8, 1e-15);
    EXPECT_NEAR(n.scenarios[1].probability, 0.2, 1e-15);
    EXPECT_EQ(n.scenarios[0].id, "a");
    const auto twice = normalize_probabilities(n);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(twice.scenarios[i].probability, n.scenarios[i].probability, 1e-12);
    s.scenarios[0].probability = s.scenarios[1].probability = 0;
    EXPECT_THROW(normalize_probabilities(s), ValidationError);
}

TEST(Normalize, CatalogUnchanged) {
    const ScenarioSet cat = builtin_catalog();
    const ScenarioSet n = normalize_probabilities(cat);
    for (std::size_t i = 0; i < cat.scenarios.size(); ++i)
        EXPECT_NEAR(n.scenarios[i].probability, cat.scenarios[i].probability, 1e-12);
}

TEST(Generate, SingleMeasure) {
    MeasureVector v;
    v.kind = MeasureKind::DegreeCentrality;
    v.values = {{1, 0.2}, {2, 0.5}, {3, 0.3}};
    const auto s = generate_from_measures({v}, 2, {0.7, 0.65}, {{MeasureCategory::Connectivity, 0.3}});
    ASSERT_EQ(s.scenarios.size(), 1u);
    EXPECT_DOUBLE_EQ(s.scenarios[0].probability, 1.0);
    EXPECT_DOUBLE_EQ(s.scenarios[0].affected.at(2), 0.7);
    EXPECT_DOUBLE_EQ(s.scenarios[0].affected.at(3), 0.65);
}

TEST(Generate, ZeroRatesAndErrors) {
    MeasureVector v;
    v.kind = MeasureKind::DegreeCentrality;
    v.values = {{1, 0.2}, {2, 0.5}};
    const auto s = generate_from_measures({v}, 2, {0.0, 0.0}, {{MeasureCategory::Connectivity, 1}});
    for (auto& [n, r] : s.scenarios[0].affected) EXPECT_EQ(r, 0.0);
    EXPECT_THROW(generate_from_measures({}, 1, {0.5}, {}), ValidationError);
    EXPECT_THROW(generate_from_measures({v}, 2, {0.5}, {}), ValidationError);
    EXPECT_THROW(generate_from_measures({v}, 2, {0.3, 0.5}, {}), ValidationError);
}

TEST(Generate, SiouxFallsCatalogShape) {
    MeasureOptions o;
    for (const auto& e : sioux_falls_demand().entries()) o.od_pairs.emplace_back(e.origin, e.destination);
    std::vector<MeasureVector> mv;
    for (MeasureKind k : all_measures()) mv.push_back(compute_measure(sioux_falls(), sioux_falls_demand(), k, o));
    const std::map<MeasureCategory, double> w{{MeasureCategory::Connectivity, 1},
                                              {MeasureCategory::Accessibility, 1},
                                              {MeasureCategory::Criticality, 1}};
    const std::vector<double> rates{0.7, 0.65, 0.65, 0.6, 0.6, 0.5, 0.5, 0.5};
    const auto s = generate_from_measures(mv, 8, rates, w);
    EXPECT_EQ(s.scenarios.size(), 27u);
    EXPECT_NEAR(s.probability_sum(), 1.0, 1e-9);
    for (const auto& sc : s.scenarios) {
        const auto ranked = rank_nodes(mv[&sc - &s.scenarios[0]], 8);
        double prev = 1.0;
        for (auto& [n, val] : ranked) {
            if (!sc.affected.count(n)) continue;
            EXPECT_LE(sc.affected.at(n), prev);
            prev = sc.affected.at(n);
        }
    }
    EXPECT_NO_THROW(validate_scenarios(s, &sioux_falls()));
}
