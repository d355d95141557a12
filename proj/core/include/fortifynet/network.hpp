#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fortifynet {

using NodeId = int;

struct Link {
    int id = 0;  ///< 1-based position in the source file
    NodeId tail = 0;
    NodeId head = 0;
    double free_flow_time = 0.0;
    double capacity = 1.0;
    // Remaining TNTP columns, kept so that a parsed file can be written back.
    double length = 0.0;
    double b = 0.15;
    double power = 4.0;
    double speed = 0.0;
    double toll = 0.0;
    int link_type = 1;
};

/// Immutable directed network. Node ids are the external labels from the input.
class Network {
public:
    Network() = default;
    Network(std::vector<NodeId> nodes, std::vector<Link> links);

    const std::vector<NodeId>& nodes() const { return nodes_; }
    const std::vector<Link>& links() const { return links_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return links_.size(); }

    bool has_node(NodeId id) const;
    const Link& link(int link_id) const;

    /// Link ids leaving / entering / touching a node, ascending.
    const std::vector<int>& out_links(NodeId id) const;
    const std::vector<int>& in_links(NodeId id) const;
    const std::vector<int>& incident_links(NodeId id) const;

    /// Dense position of a node in nodes(); throws for unknown ids.
    std::size_t index_of(NodeId id) const;
    std::optional<int> find_link(NodeId tail, NodeId head) const;

    /// Copy of the network without node `id` and every link touching it.
    /// Link ids are preserved.
    Network without_node(NodeId id) const;

private:
    std::vector<NodeId> nodes_;
    std::vector<Link> links_;
    std::map<NodeId, std::size_t> index_;
    std::map<int, std::size_t> link_pos_;
    std::vector<std::vector<int>> out_, in_, incident_;
};

struct OdDemand {
    NodeId origin = 0;
    NodeId destination = 0;
    double raw = 0.0;
    double effective = 0.0;
};

/// OD demand in input order; effective = raw * scale_multiplier.
class DemandTable {
public:
    DemandTable() = default;
    DemandTable(std::vector<OdDemand> entries, double scale_multiplier);

    const std::vector<OdDemand>& entries() const { return entries_; }
    double scale_multiplier() const { return scale_; }
    double total() const;
    std::optional<double> effective(NodeId o, NodeId d) const;
    std::vector<NodeId> origins() const;
    std::vector<NodeId> destinations() const;

private:
    std::vector<OdDemand> entries_;
    double scale_ = 1.0;
};

struct FortificationParams {
    std::map<NodeId, double> cost;
    int budget = 0;
};

enum class Severity { Warning, Error };

struct Finding {
    Severity severity = Severity::Error;
    std::string message;
};

Network parse_tntp(const std::string& text);
std::string write_tntp(const Network& net);

DemandTable load_demand(const std::string& csv_text, double scale_multiplier);

FortificationParams parse_fortification(const std::string& json_text);
void check_fortification(const Network& net, const FortificationParams& fort);

std::vector<Finding> validate(const Network& net, const DemandTable& demand);

/// Nodes reachable from `source` following link direction.
std::vector<NodeId> reachable_from(const Network& net, NodeId source);

std::string read_file(const std::string& path);

}  // namespace fortifynet
