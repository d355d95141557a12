#include "fortifynet/scenario.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "fortifynet/error.hpp"

namespace fortifynet {

double Scenario::mitigation(int link_id) const {
    auto it = gamma.find(link_id);
    return it == gamma.end() ? gamma_default : it->second;
}

double ScenarioSet::probability_sum() const {
    double s = 0;
    for (const auto& sc : scenarios) s += sc.probability;
    return s;
}

const Scenario* ScenarioSet::find(const std::string& id) const {
    for (const auto& s : scenarios)
        if (s.id == id) return &s;
    return nullptr;
}

void validate_scenarios(const ScenarioSet& set, const Network* net) {
    std::set<std::string> ids;
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (const auto& s : set.scenarios) {
        if (s.id.empty()) throw ValidationError("scenario without id");
        if (!ids.insert(s.id).second) throw ValidationError("duplicate scenario id " + s.id);
        if (s.affected.empty()) throw ValidationError("scenario " + s.id + " affects no node");
        if (!in01(s.probability)) throw ValidationError("scenario " + s.id + " probability outside [0,1]");
        if (!in01(s.gamma_default)) throw ValidationError("scenario " + s.id + " mitigation rate outside [0,1]");
        for (const auto& [n, r] : s.affected) {
            if (!in01(r)) throw ValidationError("scenario " + s.id + " disruption rate outside [0,1]");
            if (net && !net->has_node(n))
                throw ValidationError("scenario " + s.id + " affects unknown node " + std::to_string(n));
        }
        for (const auto& [l, g] : s.gamma) {
            if (!in01(g)) throw ValidationError("scenario " + s.id + " mitigation rate outside [0,1]");
            if (net) (void)net->link(l);
        }
    }
}

ScenarioSet builtin_catalog() {
    using MK = MeasureKind;
    struct Row {
        MK kind;
        std::vector<std::pair<NodeId, double>> affected;
        double p;
    };
    // Sioux Falls disruption catalog; affected nodes listed in rank order.
    const std::vector<Row> rows = {
        {MK::NeighborhoodConnectivity,
         {{9, 0.7}, {17, 0.65}, {16, 0.65}, {15, 0.65}, {14, 0.65}, {19, 0.65}, {21, 0.65}, {10, 0.65}}, 0.08},
        {MK::PhiNodeCentrality, {{2, 0.7}, {6, 0.68}, {8, 0.65}, {1, 0.64}, {7, 0.63}, {3, 0.62}, {12, 0.61}, {18, 0.6}}, 0.08},
        {MK::PageRank, {{10, 0.7}, {8, 0.68}, {11, 0.65}, {20, 0.64}, {22, 0.63}, {16, 0.63}, {15, 0.63}, {3, 0.62}}, 0.08},
        {MK::HarmonicCentrality,
         {{10, 0.7}, {11, 0.68}, {16, 0.65}, {15, 0.64}, {8, 0.64}, {20, 0.64}, {9, 0.63}, {22, 0.62}}, 0.08},
        {MK::EigenvectorCentrality,
         {{10, 0.7}, {15, 0.68}, {16, 0.66}, {17, 0.64}, {22, 0.64}, {20, 0.63}, {19, 0.62}, {11, 0.61}}, 0.06},
        {MK::KatzCentrality, {{10, 0.7}, {15, 0.7}, {16, 0.7}, {22, 0.7}, {11, 0.7}, {20, 0.7}, {8, 0.7}, {17, 0.7}}, 0.06},
        {MK::ClosenessCentrality,
         {{10, 0.7}, {11, 0.69}, {16, 0.68}, {15, 0.67}, {9, 0.66}, {17, 0.65}, {14, 0.64}, {12, 0.63}}, 0.06},
        {MK::BetweennessCentrality,
         {{10, 0.7}, {11, 0.69}, {8, 0.68}, {12, 0.67}, {16, 0.66}, {15, 0.65}, {20, 0.64}, {4, 0.63}}, 0.05},
        {MK::DegreeCentrality, {{10, 0.7}, {11, 0.69}, {8, 0.68}, {16, 0.68}, {15, 0.67}, {22, 0.67}, {20, 0.65}, {3, 0.62}}, 0.05},
        {MK::OutdegreeCentrality,
         {{14, 0.7}, {8, 0.69}, {10, 0.69}, {13, 0.69}, {15, 0.69}, {22, 0.69}, {23, 0.69}, {3, 0.68}}, 0.03},
        {MK::OutdegreeCentrality,
         {{14, 0.7}, {8, 0.69}, {10, 0.69}, {13, 0.69}, {15, 0.69}, {22, 0.69}, {23, 0.69}, {3, 0.68}}, 0.03},
        {MK::Exposure, {{11, 0.7}, {13, 0.7}, {17, 0.68}, {12, 0.67}, {2, 0.66}, {19, 0.65}, {20, 0.64}, {21, 0.64}}, 0.03},
        {MK::AggregateMeasure, {{10, 0.7}, {11, 0.66}, {8, 0.65}, {15, 0.64}, {20, 0.53}, {16, 0.5}, {4, 0.48}, {3, 0.47}}, 0.03},
        {MK::ProportionalFlow, {{10, 0.7}, {11, 0.69}, {12, 0.68}, {8, 0.67}, {20, 0.66}, {6, 0.65}, {18, 0.64}, {3, 0.63}}, 0.03},
        {MK::TsallisRedundancy, {{10, 0.7}, {11, 0.69}, {8, 0.68}, {4, 0.67}, {15, 0.66}, {3, 0.65}, {6, 0.64}, {12, 0.63}}, 0.03},
        {MK::StarTsallisRedundancy, {{6, 0.7}, {2, 0.68}, {8, 0.66}, {7, 0.64}, {18, 0.62}, {20, 0.6}}, 0.03},
        {MK::GroupCentrality, {{10, 0.7}, {11, 0.6}, {8, 0.6}, {16, 0.6}, {15, 0.6}, {22, 0.6}, {20, 0.6}, {3, 0.5}}, 0.03},
        {MK::AverageRating, {{1, 0.7}, {3, 0.68}, {2, 0.66}, {4, 0.64}, {6, 0.62}, {5, 0.6}, {7, 0.4}, {8, 0.35}}, 0.02},
        {MK::AveragePathDistance, {{1, 0.7}, {3, 0.68}, {2, 0.66}, {4, 0.64}, {6, 0.63}, {5, 0.6}, {7, 0.4}, {8, 0.35}}, 0.02},
        {MK::AveragePathDistanceAfterDisruption,
         {{24, 0.7}, {23, 0.7}, {22, 0.7}, {21, 0.7}, {20, 0.7}, {19, 0.7}, {18, 0.7}, {17, 0.7}}, 0.02},
        {MK::WeightedNode, {{10, 0.7}, {11, 0.68}, {8, 0.66}, {4, 0.64}, {15, 0.64}, {3, 0.62}, {6, 0.6}, {12, 0.58}}, 0.02},
        {MK::WeightedNodeAfterDisruption,
         {{12, 0.7}, {20, 0.68}, {16, 0.66}, {17, 0.64}, {18, 0.62}, {8, 0.6}, {11, 0.58}, {24, 0.56}}, 0.02},
        {MK::UndeliveredDemandAfterDisruption,
         {{1, 0.7}, {2, 0.7}, {3, 0.7}, {6, 0.7}, {4, 0.7}, {12, 0.7}, {5, 0.7}, {11, 0.7}}, 0.02},
        {MK::PathDistanceChange, {{1, 0.7}, {2, 0.68}, {3, 0.66}, {6, 0.64}, {4, 0.64}, {12, 0.6}, {5, 0.4}, {11, 0.35}}, 0.01},
        {MK::Segmentwise, {{21, 0.7}, {20, 0.68}, {22, 0.66}, {19, 0.64}, {23, 0.62}, {24, 0.6}, {13, 0.58}, {14, 0.56}}, 0.01},
        {MK::ComplexityMeasureTsallis,
         {{8, 0.7}, {4, 0.69}, {15, 0.68}, {3, 0.67}, {6, 0.66}, {12, 0.65}, {9, 0.64}, {20, 0.63}}, 0.01},
        {MK::ComplexityMeasureDistribution,
         {{11, 0.7}, {8, 0.69}, {4, 0.68}, {15, 0.67}, {3, 0.66}, {6, 0.65}, {12, 0.64}, {9, 0.63}}, 0.01},
    };
    ScenarioSet set;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Scenario s;
        s.id = "xi_" + std::to_string(i + 1);
        s.source_measure = rows[i].kind;
        for (auto [n, r] : rows[i].affected) s.affected[n] = r;
        s.probability = rows[i].p;
        for (const auto& prev : set.scenarios)
            if (prev.source_measure == s.source_measure && prev.affected == s.affected) {
                s.duplicate_of = prev.id;
                break;
            }
        set.scenarios.push_back(std::move(s));
    }
    return set;
}

ScenarioSet normalize_probabilities(ScenarioSet set) {
    const double sum = set.probability_sum();
    if (!(sum > 0)) throw ValidationError("scenario probabilities sum to zero");
    for (auto& s : set.scenarios) s.probability /= sum;
    return set;
}

ScenarioSet generate_from_measures(const std::vector<MeasureVector>& measures, std::size_t top_m,
                                   const std::vector<double>& rate_schedule,
                                   const std::map<MeasureCategory, double>& prob_weights, double gamma_default) {
    if (measures.empty()) throw ValidationError("no measures to generate scenarios from");
    if (top_m == 0) throw ValidationError("top_m must be positive");
    if (rate_schedule.size() < top_m) throw ValidationError("rate schedule shorter than top_m");
    for (std::size_t i = 0; i < rate_schedule.size(); ++i) {
        if (rate_schedule[i] < 0 || rate_schedule[i] > 1) throw ValidationError("rate outside [0,1]");
        if (i > 0 && rate_schedule[i] > rate_schedule[i - 1]) throw ValidationError("rate schedule must be nonincreasing");
    }
    ScenarioSet set;
    for (const auto& mv : measures) {
        Scenario s;
        s.id = "gen_" + std::to_string(set.scenarios.size() + 1);
        s.source_measure = mv.kind;
        s.gamma_default = gamma_default;
        const auto ranked = rank_nodes(mv, top_m);
        for (std::size_t r = 0; r < ranked.size(); ++r)
            if (ranked[r].second) s.affected[ranked[r].first] = rate_schedule[r];
        if (s.affected.empty()) continue;
        auto w = prob_weights.find(category_of(mv.kind));
        s.probability = w == prob_weights.end() ? 0.0 : w->second;
        if (s.probability < 0) throw ValidationError("negative probability weight");
        set.scenarios.push_back(std::move(s));
    }
    if (set.scenarios.empty()) throw ValidationError("every measure is undefined on all nodes");
    return normalize_probabilities(std::move(set));
}

std::string scenarios_to_json(const ScenarioSet& set) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& s : set.scenarios) {
        nlohmann::ordered_json j;
        j["id"] = s.id;
        j["measure"] = measure_name(s.source_measure);
        nlohmann::ordered_json aff = nlohmann::ordered_json::object();
        for (const auto& [n, r] : s.affected) aff[std::to_string(n)] = r;
        j["affected"] = aff;
        j["gamma_default"] = s.gamma_default;
        if (!s.gamma.empty()) {
            nlohmann::ordered_json g = nlohmann::ordered_json::object();
            for (const auto& [l, v] : s.gamma) g[std::to_string(l)] = v;
            j["gamma"] = g;
        }
        j["probability"] = s.probability;
        if (s.duplicate_of) j["duplicate_of"] = *s.duplicate_of;
        arr.push_back(j);
    }
    return arr.dump(1);
}

ScenarioSet scenarios_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what(), 0);
    }
    if (j.is_object() && j.contains("scenarios")) j = j["scenarios"];
    if (!j.is_array()) throw ParseError("scenario JSON must be an array", 0);
    ScenarioSet set;
    auto key_int = [](const std::string& k) {
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(k, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != k.size() || k.empty()) throw ParseError("'" + k + "' is not an integer id", 0);
        return v;
    };
    for (const auto& o : j) {
        Scenario s;
        try {
            s.id = o.at("id").get<std::string>();
            auto mk = parse_measure(o.at("measure").get<std::string>());
            if (!mk) throw ParseError("unknown measure '" + o.at("measure").get<std::string>() + "'", 0);
            s.source_measure = *mk;
            for (auto it = o.at("affected").begin(); it != o.at("affected").end(); ++it)
                s.affected[key_int(it.key())] = it->get<double>();
            s.gamma_default = o.value("gamma_default", 0.5);
            if (o.contains("gamma"))
                for (auto it = o["gamma"].begin(); it != o["gamma"].end(); ++it)
                    s.gamma[key_int(it.key())] = it->get<double>();
            s.probability = o.at("probability").get<double>();
            if (o.contains("duplicate_of")) s.duplicate_of = o["duplicate_of"].get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("scenario JSON: ") + e.what(), 0);
        }
        set.scenarios.push_back(std::move(s));
    }
    validate_scenarios(set);
    return set;
}

}  // namespace fortifynet
