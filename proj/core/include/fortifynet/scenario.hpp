#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fortifynet/measures.hpp"
#include "fortifynet/network.hpp"

namespace fortifynet {

struct Scenario {
    std::string id;
    MeasureKind source_measure = MeasureKind::DegreeCentrality;
    std::map<NodeId, double> affected;  ///< node -> disruption rate
    double gamma_default = 0.5;         ///< mitigation rate for every link without an override
    std::map<int, double> gamma;        ///< per-link overrides, keyed by link id
    double probability = 0.0;
    std::optional<std::string> duplicate_of;  ///< set when the content repeats an earlier scenario

    double mitigation(int link_id) const;
    bool high_risk() const { return probability >= 0.06; }
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;

    double probability_sum() const;
    const Scenario* find(const std::string& id) const;
};

/// Checks rates, probabilities, unique ids and that affected nodes exist (when a network is given).
void validate_scenarios(const ScenarioSet& set, const Network* net = nullptr);

ScenarioSet builtin_catalog();

ScenarioSet normalize_probabilities(ScenarioSet set);

/// One scenario per measure: the top_m ranked nodes take the schedule rates in rank order.
/// Probability of a scenario is the weight of its measure's category, then normalized.
ScenarioSet generate_from_measures(const std::vector<MeasureVector>& measures, std::size_t top_m,
                                   const std::vector<double>& rate_schedule,
                                   const std::map<MeasureCategory, double>& prob_weights, double gamma_default = 0.5);

std::string scenarios_to_json(const ScenarioSet& set);
ScenarioSet scenarios_from_json(const std::string& text);

}  // namespace fortifynet
