#include "fortifynet/network.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "fortifynet/error.hpp"

namespace fortifynet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    char* end = nullptr;
    errno = 0;
    out = std::strtod(tok.c_str(), &end);
    return errno == 0 && end == tok.c_str() + tok.size();
}

bool parse_int(const std::string& tok, long long& out) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Network::Network(std::vector<NodeId> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    std::sort(nodes_.begin(), nodes_.end());
    if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
        throw ValidationError("duplicate node id");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i] <= 0) throw ValidationError("node ids must be positive");
        index_[nodes_[i]] = i;
    }
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    incident_.assign(nodes_.size(), {});
    for (std::size_t p = 0; p < links_.size(); ++p) {
        const Link& l = links_[p];
        if (!has_node(l.tail) || !has_node(l.head))
            throw ValidationError("link " + std::to_string(l.id) + " references an unknown node");
        if (l.tail == l.head) throw ValidationError("link " + std::to_string(l.id) + " is a self-loop");
        if (!(l.capacity > 0.0)) throw ValidationError("link " + std::to_string(l.id) + " has nonpositive capacity");
        if (!(l.free_flow_time >= 0.0))
            throw ValidationError("link " + std::to_string(l.id) + " has negative free-flow time");
        if (!link_pos_.emplace(l.id, p).second) throw ValidationError("duplicate link id " + std::to_string(l.id));
        out_[index_[l.tail]].push_back(l.id);
        in_[index_[l.head]].push_back(l.id);
        incident_[index_[l.tail]].push_back(l.id);
        incident_[index_[l.head]].push_back(l.id);
    }
    for (auto* v : {&out_, &in_, &incident_})
        for (auto& lst : *v) std::sort(lst.begin(), lst.end());
}

bool Network::has_node(NodeId id) const { return index_.count(id) > 0; }

const Link& Network::link(int link_id) const {
    auto it = link_pos_.find(link_id);
    if (it == link_pos_.end()) throw ValidationError("unknown link id " + std::to_string(link_id));
    return links_[it->second];
}

std::size_t Network::index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown node " + std::to_string(id));
    return it->second;
}

const std::vector<int>& Network::out_links(NodeId id) const { return out_[index_of(id)]; }
const std::vector<int>& Network::in_links(NodeId id) const { return in_[index_of(id)]; }
const std::vector<int>& Network::incident_links(NodeId id) const { return incident_[index_of(id)]; }

std::optional<int> Network::find_link(NodeId tail, NodeId head) const {
    if (!has_node(tail)) return std::nullopt;
    for (int lid : out_links(tail))
        if (link(lid).head == head) return lid;
    return std::nullopt;
}

Network Network::without_node(NodeId id) const {
    std::vector<NodeId> nodes;
    for (NodeId n : nodes_)
        if (n != id) nodes.push_back(n);
    std::vector<Link> links;
    for (const Link& l : links_)
        if (l.tail != id && l.head != id) links.push_back(l);
    return Network(std::move(nodes), std::move(links));
}

Network parse_tntp(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    std::optional<long long> n_nodes, n_links;
    std::vector<Link> links;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '~') continue;
        if (line[0] == '<') {
            const auto close = line.find('>');
            if (close == std::string::npos) throw ParseError("unterminated metadata tag", line_no);
            const std::string key = line.substr(1, close - 1);
            const std::string value = trim(line.substr(close + 1));
            if (key == "END OF METADATA") continue;
            long long v = 0;
            if (key == "NUMBER OF NODES" || key == "NUMBER OF LINKS") {
                if (!parse_int(value, v) || v < 0) throw ParseError("bad value for <" + key + ">", line_no);
                (key == "NUMBER OF NODES" ? n_nodes : n_links) = v;
            }
            continue;
        }
        const auto semi = line.find(';');
        if (semi == std::string::npos) throw ParseError("data row not terminated by ';'", line_no);
        if (!trim(line.substr(semi + 1)).empty()) throw ParseError("trailing text after ';'", line_no);
        std::istringstream fields(line.substr(0, semi));
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.size() < 5 || tok.size() > 10)
            throw ParseError("expected 5 to 10 fields, got " + std::to_string(tok.size()), line_no);
        long long tail = 0, head = 0;
        if (!parse_int(tok[0], tail) || !parse_int(tok[1], head)) throw ParseError("node ids must be integers", line_no);
        double vals[8] = {0, 0, 0, 0.15, 4, 0, 0, 1};
        for (std::size_t k = 2; k < tok.size(); ++k)
            if (!parse_double(tok[k], vals[k - 2])) throw ParseError("non-numeric field '" + tok[k] + "'", line_no);
        Link l;
        l.id = static_cast<int>(links.size()) + 1;
        l.tail = static_cast<NodeId>(tail);
        l.head = static_cast<NodeId>(head);
        l.capacity = vals[0];
        l.length = vals[1];
        l.free_flow_time = vals[2];
        l.b = vals[3];
        l.power = vals[4];
        l.speed = vals[5];
        l.toll = vals[6];
        l.link_type = static_cast<int>(vals[7]);
        if (l.tail == l.head) throw ParseError("self-loop link", line_no);
        if (!(l.capacity > 0)) throw ParseError("capacity must be positive", line_no);
        if (!(l.free_flow_time >= 0)) throw ParseError("free-flow time must be nonnegative", line_no);
        links.push_back(l);
    }

    std::vector<NodeId> nodes;
    if (n_nodes) {
        for (long long i = 1; i <= *n_nodes; ++i) nodes.push_back(static_cast<NodeId>(i));
        for (const Link& l : links)
            if (l.tail < 1 || l.tail > *n_nodes || l.head < 1 || l.head > *n_nodes)
                throw ValidationError("link " + std::to_string(l.id) + " endpoint exceeds <NUMBER OF NODES> " +
                                      std::to_string(*n_nodes));
    } else {
        std::set<NodeId> s;
        for (const Link& l : links) {
            s.insert(l.tail);
            s.insert(l.head);
        }
        nodes.assign(s.begin(), s.end());
    }
    if (n_links && static_cast<std::size_t>(*n_links) != links.size())
        throw ValidationError("<NUMBER OF LINKS> is " + std::to_string(*n_links) + " but " +
                              std::to_string(links.size()) + " rows were read");
    return Network(std::move(nodes), std::move(links));
}

std::string write_tntp(const Network& net) {
    std::ostringstream out;
    out << "<NUMBER OF ZONES> " << net.node_count() << "\n";
    out << "<NUMBER OF NODES> " << net.node_count() << "\n";
    out << "<FIRST THRU NODE> 1\n";
    out << "<NUMBER OF LINKS> " << net.link_count() << "\n";
    out << "<END OF METADATA>\n\n";
    out << "~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n";
    for (const Link& l : net.links()) {
        out << '\t' << l.tail << '\t' << l.head << '\t' << fmt_num(l.capacity) << '\t' << fmt_num(l.length) << '\t'
            << fmt_num(l.free_flow_time) << '\t' << fmt_num(l.b) << '\t' << fmt_num(l.power) << '\t'
            << fmt_num(l.speed) << '\t' << fmt_num(l.toll) << '\t' << l.link_type << "\t;\n";
    }
    return out.str();
}

DemandTable::DemandTable(std::vector<OdDemand> entries, double scale_multiplier)
    : entries_(std::move(entries)), scale_(scale_multiplier) {
    if (!(scale_ > 0)) throw ValidationError("demand scale multiplier must be positive");
    std::set<std::pair<NodeId, NodeId>> seen;
    for (auto& e : entries_) {
        if (!(e.raw >= 0)) throw ValidationError("negative demand");
        if (!seen.emplace(e.origin, e.destination).second)
            throw ValidationError("duplicate OD pair (" + std::to_string(e.origin) + "," +
                                  std::to_string(e.destination) + ")");
        e.effective = e.raw * scale_;
    }
}

double DemandTable::total() const {
    double s = 0;
    for (const auto& e : entries_) s += e.effective;
    return s;
}

std::optional<double> DemandTable::effective(NodeId o, NodeId d) const {
    for (const auto& e : entries_)
        if (e.origin == o && e.destination == d) return e.effective;
    return std::nullopt;
}

std::vector<NodeId> DemandTable::origins() const {
    std::set<NodeId> s;
    for (const auto& e : entries_) s.insert(e.origin);
    return {s.begin(), s.end()};
}

std::vector<NodeId> DemandTable::destinations() const {
    std::set<NodeId> s;
    for (const auto& e : entries_) s.insert(e.destination);
    return {s.begin(), s.end()};
}

DemandTable load_demand(const std::string& csv_text, double scale_multiplier) {
    std::istringstream in(csv_text);
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<OdDemand> rows;
    std::set<std::pair<NodeId, NodeId>> seen;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            std::string h;
            for (char c : line)
                if (c != ' ') h += c;
            if (h != "origin,destination,demand") throw ParseError("expected header origin,destination,demand", line_no);
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string t; std::getline(ss, t, ',');) f.push_back(trim(t));
        if (f.size() != 3) throw ParseError("expected 3 fields", line_no);
        long long o = 0, d = 0;
        double v = 0;
        if (!parse_int(f[0], o) || !parse_int(f[1], d)) throw ParseError("node ids must be integers", line_no);
        if (!parse_double(f[2], v)) throw ParseError("non-numeric demand", line_no);
        if (v < 0) throw ParseError("negative demand", line_no);
        if (!seen.emplace(o, d).second) throw ParseError("duplicate OD pair", line_no);
        rows.push_back({static_cast<NodeId>(o), static_cast<NodeId>(d), v, 0.0});
    }
    if (!header_seen) throw ParseError("empty demand file", 0);
    return DemandTable(std::move(rows), scale_multiplier);
}

FortificationParams parse_fortification(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("fortification JSON: ") + e.what(), 0);
    }
    FortificationParams p;
    if (!j.contains("cost") || !j["cost"].is_object()) throw ParseError("fortification JSON lacks a 'cost' object", 0);
    if (!j.contains("budget") || !j["budget"].is_number_integer())
        throw ParseError("fortification JSON lacks an integer 'budget'", 0);
    for (auto it = j["cost"].begin(); it != j["cost"].end(); ++it) {
        long long id = 0;
        if (!parse_int(it.key(), id)) throw ParseError("cost key '" + it.key() + "' is not a node id", 0);
        if (!it->is_number()) throw ParseError("cost for node " + it.key() + " is not numeric", 0);
        const double c = it->get<double>();
        if (c < 0) throw ValidationError("negative fortification cost for node " + it.key());
        p.cost[static_cast<NodeId>(id)] = c;
    }
    p.budget = j["budget"].get<int>();
    if (p.budget < 0) throw ValidationError("negative fortification budget");
    return p;
}

void check_fortification(const Network& net, const FortificationParams& fort) {
    for (NodeId n : net.nodes())
        if (!fort.cost.count(n)) throw ValidationError("no fortification cost for node " + std::to_string(n));
    for (const auto& [n, c] : fort.cost)
        if (!net.has_node(n)) throw ValidationError("fortification cost for unknown node " + std::to_string(n));
    if (fort.budget < 0 || static_cast<std::size_t>(fort.budget) > net.node_count())
        throw ValidationError("fortification budget outside [0, |nodes|]");
}

std::vector<NodeId> reachable_from(const Network& net, NodeId source) {
    std::vector<char> seen(net.node_count(), 0);
    std::deque<NodeId> q{source};
    seen[net.index_of(source)] = 1;
    std::vector<NodeId> out;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop_front();
        out.push_back(u);
        for (int lid : net.out_links(u)) {
            NodeId v = net.link(lid).head;
            auto& s = seen[net.index_of(v)];
            if (!s) {
                s = 1;
                q.push_back(v);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Finding> validate(const Network& net, const DemandTable& demand) {
    std::vector<Finding> out;
    for (const auto& e : demand.entries()) {
        const std::string pair = "(" + std::to_string(e.origin) + "," + std::to_string(e.destination) + ")";
        bool ok = true;
        if (!net.has_node(e.origin)) {
            out.push_back({Severity::Error, "unknown origin in OD pair " + pair});
            ok = false;
        }
        if (!net.has_node(e.destination)) {
            out.push_back({Severity::Error, "unknown destination in OD pair " + pair});
            ok = false;
        }
        if (!(e.effective >= 0)) {
            out.push_back({Severity::Error, "negative demand for OD pair " + pair});
            ok = false;
        }
        if (!ok) continue;
        auto r = reachable_from(net, e.origin);
        if (!std::binary_search(r.begin(), r.end(), e.destination))
            out.push_back({Severity::Error, "OD pair disconnected " + pair});
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace fortifynet
