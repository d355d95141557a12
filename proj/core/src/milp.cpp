#include "fortifynet/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "fortifynet/error.hpp"

namespace fortifynet {

LinearExpr& LinearExpr::add(const LinearExpr& other, double scale) {
    for (const auto& [v, c] : other.terms) terms.emplace_back(v, c * scale);
    constant += other.constant * scale;
    return *this;
}

void LinearExpr::canonicalize() {
    std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarId, double>> merged;
    for (const auto& t : terms) {
        if (!merged.empty() && merged.back().first == t.first)
            merged.back().second += t.second;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(), [](const auto& t) { return t.second == 0.0; }),
                 merged.end());
    terms = std::move(merged);
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
    double s = constant;
    for (const auto& [v, c] : terms) s += c * values.at(static_cast<std::size_t>(v));
    return s;
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Feasible: return "feasible";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::Unbounded: return "unbounded";
        case SolveStatus::Error: return "error";
    }
    return "error";
}

bool valid_name(const std::string& name) {
    if (name.empty() || name.size() > 255) return false;
    const auto first = static_cast<unsigned char>(name[0]);
    if (!(std::isalpha(first) || first == '_')) return false;
    for (unsigned char c : name)
        if (!(std::isalnum(c) || c == '_' || c == '(' || c == ')' || c == '.' || c == ',')) return false;
    return true;
}

VarId MilpModel::add_variable(const std::string& name, VarKind kind, double lower, double upper) {
    if (!valid_name(name)) throw ValidationError("illegal variable name '" + name + "'");
    if (by_name_.count(name)) throw ValidationError("duplicate variable '" + name + "'");
    if (kind == VarKind::Binary) {
        lower = 0.0;
        upper = 1.0;
    }
    if (std::isnan(lower) || std::isnan(upper) || lower > upper)
        throw ValidationError("invalid bounds for variable '" + name + "'");
    const VarId id = static_cast<VarId>(vars_.size());
    vars_.push_back({name, kind, lower, upper});
    by_name_.emplace(name, id);
    return id;
}

void MilpModel::check_expr(const LinearExpr& e) const {
    for (const auto& [v, c] : e.terms) {
        if (v < 0 || static_cast<std::size_t>(v) >= vars_.size())
            throw ValidationError("expression references undeclared variable id " + std::to_string(v));
        if (!std::isfinite(c)) throw ValidationError("non-finite coefficient on '" + vars_[v].name + "'");
    }
}

int MilpModel::add_constraint(const std::string& name, LinearExpr expr, Sense sense, double rhs) {
    if (!valid_name(name)) throw ValidationError("illegal constraint name '" + name + "'");
    if (row_names_.count(name)) throw ValidationError("duplicate constraint '" + name + "'");
    check_expr(expr);
    if (!std::isfinite(rhs)) throw ValidationError("non-finite right-hand side in '" + name + "'");
    expr.canonicalize();
    rhs -= expr.constant;
    expr.constant = 0.0;
    const int idx = static_cast<int>(rows_.size());
    rows_.push_back({name, std::move(expr), sense, rhs});
    row_names_.emplace(name, idx);
    return idx;
}

void MilpModel::set_objective(LinearExpr expr) {
    check_expr(expr);
    expr.canonicalize();
    objective_ = std::move(expr);
}

void MilpModel::add_fragment(const Fragment& frag) {
    for (const auto& v : frag.variables) add_variable(v.name, v.kind, v.lower, v.upper);
    for (const auto& r : frag.rows) {
        LinearExpr e;
        for (const auto& [name, c] : r.terms) e.add(id(name), c);
        add_constraint(r.name, std::move(e), r.sense, r.rhs);
    }
}

std::optional<VarId> MilpModel::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

VarId MilpModel::id(const std::string& name) const {
    auto v = find(name);
    if (!v) throw ValidationError("unknown variable '" + name + "'");
    return *v;
}

std::size_t MilpModel::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
}

std::vector<ModelFinding> MilpModel::validate() const {
    std::vector<ModelFinding> out;
    std::vector<char> used(vars_.size(), 0);
    for (const auto& [v, c] : objective_.terms) used[v] = 1;
    for (const auto& r : rows_) {
        for (const auto& [v, c] : r.expr.terms) used[v] = 1;
        if (r.expr.terms.empty()) {
            const bool ok = (r.sense == Sense::LessEqual && 0.0 <= r.rhs) ||
                            (r.sense == Sense::GreaterEqual && 0.0 >= r.rhs) || (r.sense == Sense::Equal && r.rhs == 0.0);
            out.push_back({ok ? "constant row" : "infeasible row", r.name});
        }
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (!used[i]) out.push_back({"unused variable", vars_[i].name});
    if (objective_.terms.empty()) out.push_back({"empty objective", ""});
    return out;
}

}  // namespace fortifynet
