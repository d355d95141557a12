#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fortifynet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class Sense { LessEqual, GreaterEqual, Equal };

using VarId = int;

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = kInf;
};

struct LinearExpr {
    std::vector<std::pair<VarId, double>> terms;
    double constant = 0.0;

    LinearExpr& add(VarId v, double coef) {
        terms.emplace_back(v, coef);
        return *this;
    }
    LinearExpr& add(const LinearExpr& other, double scale = 1.0);

    /// Merges repeated variables, drops zero coefficients, sorts by variable id.
    void canonicalize();
    double evaluate(const std::vector<double>& values) const;
};

struct Constraint {
    std::string name;
    LinearExpr expr;  ///< constant is always 0 after add_constraint
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

struct ModelFinding {
    std::string kind;  ///< "unused variable", "infeasible row", "empty objective", ...
    std::string detail;
};

/// Name-addressed pieces of a model, merged with MilpModel::add_fragment.
struct Fragment {
    struct Row {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Sense sense = Sense::LessEqual;
        double rhs = 0.0;
    };
    std::vector<Variable> variables;
    std::vector<Row> rows;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, Error };

std::string status_name(SolveStatus s);

struct RawSolution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    std::unordered_map<std::string, double> values;
    std::optional<double> best_bound;
    std::optional<double> gap;  ///< relative gap reported by the solver
    double seconds = 0.0;
    std::string log;
};

bool valid_name(const std::string& name);

/// Minimization MILP. Variables and constraints keep insertion order.
class MilpModel {
public:
    VarId add_variable(const std::string& name, VarKind kind, double lower = 0.0, double upper = kInf);
    int add_constraint(const std::string& name, LinearExpr expr, Sense sense, double rhs);
    void set_objective(LinearExpr expr);
    void add_fragment(const Fragment& frag);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    const LinearExpr& objective() const { return objective_; }
    std::optional<VarId> find(const std::string& name) const;
    VarId id(const std::string& name) const;

    std::size_t binary_count() const;
    std::vector<ModelFinding> validate() const;
    /// Objective value (including its constant) at a full assignment indexed by VarId.
    double objective_value(const std::vector<double>& values) const { return objective_.evaluate(values); }

private:
    void check_expr(const LinearExpr& e) const;

    std::vector<Variable> vars_;
    std::unordered_map<std::string, VarId> by_name_;
    std::vector<Constraint> rows_;
    std::unordered_map<std::string, int> row_names_;
    LinearExpr objective_;
};

}  // namespace fortifynet
