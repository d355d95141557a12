#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "fortifynet/error.hpp"
#include "fortifynet/solver_bridge.hpp"

namespace fortifynet {

namespace {

std::string num(double v) {
    if (v == kInf) return "+inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char* sense_token(Sense s) {
    switch (s) {
        case Sense::LessEqual: return "<=";
        case Sense::GreaterEqual: return ">=";
        case Sense::Equal: return "=";
    }
    return "=";
}

void append_terms(std::string& out, const MilpModel& m, const LinearExpr& e) {
    int on_line = 0;
    bool first = true;
    for (const auto& [v, c] : e.terms) {
        if (on_line == 8) {
            out += "\n  ";
            on_line = 0;
        }
        if (c < 0)
            out += first ? "- " : " - ";
        else if (!first)
            out += " + ";
        out += num(std::abs(c));
        out += ' ';
        out += m.variables()[v].name;
        first = false;
        ++on_line;
    }
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool to_number(const std::string& t, double& out) {
    const std::string l = lower(t);
    if (l == "inf" || l == "+inf" || l == "infinity" || l == "+infinity") {
        out = kInf;
        return true;
    }
    if (l == "-inf" || l == "-infinity") {
        out = -kInf;
        return true;
    }
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' ||
                                          t[0] == '+' || t[0] == '.');
}

}  // namespace

std::string write_lp(const MilpModel& m) {
    for (const auto& v : m.variables())
        if (!valid_name(v.name)) throw ValidationError("variable name illegal in LP output: '" + v.name + "'");
    std::string out;
    out.reserve(64 * (m.variables().size() + m.constraints().size()));
    if (m.objective().constant != 0.0) out += "\\ objective constant: " + num(m.objective().constant) + "\n";
    out += "Minimize\n obj: ";
    append_terms(out, m, m.objective());
    out += "\nSubject To\n";
    std::vector<char> used(m.variables().size(), 0);
    for (const auto& [v, c] : m.objective().terms) used[v] = 1;
    for (const auto& r : m.constraints()) {
        if (r.expr.terms.empty()) throw ValidationError("constraint '" + r.name + "' has no variables");
        for (const auto& [v, c] : r.expr.terms) used[v] = 1;
        out += ' ';
        out += r.name;
        out += ": ";
        append_terms(out, m, r.expr);
        out += ' ';
        out += sense_token(r.sense);
        out += ' ';
        out += num(r.rhs);
        out += '\n';
    }
    out += "Bounds\n";
    for (std::size_t i = 0; i < m.variables().size(); ++i) {
        const auto& v = m.variables()[i];
        if (v.kind == VarKind::Binary) continue;
        if (v.lower == 0.0 && v.upper == kInf) {
            if (!used[i]) out += " " + v.name + " >= 0\n";
        } else if (v.lower == -kInf && v.upper == kInf) {
            out += " " + v.name + " free\n";
        } else if (v.lower == v.upper) {
            out += " " + v.name + " = " + num(v.lower) + "\n";
        } else if (v.upper == kInf) {
            out += " " + v.name + " >= " + num(v.lower) + "\n";
        } else {
            out += " " + num(v.lower) + " <= " + v.name + " <= " + num(v.upper) + "\n";
        }
    }
    bool any_bin = false;
    for (const auto& v : m.variables()) {
        if (v.kind != VarKind::Binary) continue;
        if (!any_bin) out += "Binary\n";
        any_bin = true;
        out += " " + v.name + "\n";
    }
    out += "End\n";
    return out;
}

MilpModel parse_lp(const std::string& text) {
    enum class Sec { None, Obj, Rows, Bounds, Binary, General, End };
    struct PendingVar {
        VarKind kind = VarKind::Continuous;
        double lo = 0.0, hi = kInf;
    };
    std::vector<std::string> order;
    std::map<std::string, PendingVar> vars;
    auto touch = [&](const std::string& n) {
        if (!vars.count(n)) {
            if (!valid_name(n)) throw ParseError("illegal name '" + n + "'", 0);
            vars[n] = {};
            order.push_back(n);
        }
    };
    struct Row {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Sense sense;
        double rhs;
    };
    std::vector<Row> rows;
    std::vector<std::pair<std::string, double>> obj;

    // Statement tokens accumulate until a row is complete.
    std::vector<std::string> stmt;
    std::size_t stmt_line = 0;
    auto parse_terms = [&](std::size_t from, std::size_t to, std::vector<std::pair<std::string, double>>& terms) {
        double sign = 1.0, coef = 1.0;
        bool have_coef = false;
        for (std::size_t i = from; i < to; ++i) {
            const std::string& t = stmt[i];
            double v = 0;
            if (t == "+") continue;
            if (t == "-") {
                sign = -sign;
                continue;
            }
            if (to_number(t, v)) {
                coef = v;
                have_coef = true;
                continue;
            }
            touch(t);
            terms.emplace_back(t, sign * (have_coef ? coef : 1.0));
            sign = 1.0;
            coef = 1.0;
            have_coef = false;
        }
    };
    auto flush_row = [&]() -> bool {
        // label: terms sense rhs
        std::size_t sense_at = stmt.size();
        for (std::size_t i = 0; i < stmt.size(); ++i)
            if (stmt[i] == "<=" || stmt[i] == ">=" || stmt[i] == "=" || stmt[i] == "=<" || stmt[i] == "=>") sense_at = i;
        if (sense_at == stmt.size() || sense_at + 2 > stmt.size()) return false;
        std::string rhs_tok;
        for (std::size_t i = sense_at + 1; i < stmt.size(); ++i) rhs_tok += stmt[i];
        double rhs = 0;
        if (!to_number(rhs_tok, rhs)) return false;
        Row r;
        std::size_t from = 0;
        if (!stmt.empty() && stmt[0].back() == ':') {
            r.name = stmt[0].substr(0, stmt[0].size() - 1);
            from = 1;
        } else {
            r.name = "R" + std::to_string(rows.size() + 1);
        }
        parse_terms(from, sense_at, r.terms);
        const std::string& s = stmt[sense_at];
        r.sense = (s == "<=" || s == "=<") ? Sense::LessEqual : (s == ">=" || s == "=>") ? Sense::GreaterEqual : Sense::Equal;
        r.rhs = rhs;
        rows.push_back(std::move(r));
        stmt.clear();
        return true;
    };

    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    Sec sec = Sec::None;
    double obj_constant = 0.0;
    const std::string constant_tag = "\\ objective constant:";
    while (std::getline(in, raw)) {
        ++line_no;
        if (raw.rfind(constant_tag, 0) == 0) {
            std::string t = raw.substr(constant_tag.size());
            t.erase(0, t.find_first_not_of(' '));
            if (!to_number(t, obj_constant)) throw ParseError("bad objective constant", line_no);
            continue;
        }
        if (auto c = raw.find('\\'); c != std::string::npos) raw.erase(c);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) {
            // Split a glued label such as "c1:x".
            auto colon = t.find(':');
            if (colon != std::string::npos && colon + 1 < t.size()) {
                tok.push_back(t.substr(0, colon + 1));
                tok.push_back(t.substr(colon + 1));
            } else {
                tok.push_back(t);
            }
        }
        if (tok.empty()) continue;
        const std::string head = lower(tok[0]);
        const std::string head2 = tok.size() > 1 ? head + " " + lower(tok[1]) : head;
        Sec next = sec;
        bool consumed_two = false;
        if (head == "minimize" || head == "minimise" || head == "min") next = Sec::Obj;
        else if (head == "maximize" || head == "maximise" || head == "max") throw ParseError("maximization is not supported", line_no);
        else if (head2 == "subject to" || head2 == "such that") { next = Sec::Rows; consumed_two = true; }
        else if (head == "st" || head == "s.t." || head == "st:") next = Sec::Rows;
        else if (head == "bounds" || head == "bound") next = Sec::Bounds;
        else if (head == "binary" || head == "binaries" || head == "bin") next = Sec::Binary;
        else if (head == "general" || head == "generals" || head == "gen") next = Sec::General;
        else if (head == "end") next = Sec::End;
        if (next != sec) {
            if (sec == Sec::Rows && !stmt.empty()) throw ParseError("incomplete constraint", stmt_line);
            if (sec == Sec::Obj) {
                std::size_t from = (!stmt.empty() && stmt[0].back() == ':') ? 1 : 0;
                parse_terms(from, stmt.size(), obj);
                stmt.clear();
            }
            sec = next;
            tok.erase(tok.begin(), tok.begin() + (consumed_two ? 2 : 1));
            if (tok.empty()) continue;
        }
        switch (sec) {
            case Sec::None: throw ParseError("text before the objective section", line_no);
            case Sec::End: throw ParseError("text after End", line_no);
            case Sec::Obj: stmt.insert(stmt.end(), tok.begin(), tok.end()); break;
            case Sec::Rows:
                if (stmt.empty()) stmt_line = line_no;
                stmt.insert(stmt.end(), tok.begin(), tok.end());
                flush_row();
                break;
            case Sec::Bounds: {
                double a = 0, b = 0;
                if (tok.size() == 2 && lower(tok[1]) == "free") {
                    touch(tok[0]);
                    vars[tok[0]].lo = -kInf;
                    vars[tok[0]].hi = kInf;
                } else if (tok.size() == 3 && !to_number(tok[0], a) && to_number(tok[2], b)) {
                    touch(tok[0]);
                    auto& v = vars[tok[0]];
                    if (tok[1] == "<=") v.hi = b;
                    else if (tok[1] == ">=") v.lo = b;
                    else if (tok[1] == "=") v.lo = v.hi = b;
                    else throw ParseError("bad bound operator", line_no);
                } else if (tok.size() == 5 && to_number(tok[0], a) && to_number(tok[4], b) && tok[1] == "<=" &&
                           tok[3] == "<=") {
                    touch(tok[2]);
                    vars[tok[2]].lo = a;
                    vars[tok[2]].hi = b;
                } else {
                    throw ParseError("unsupported bound line", line_no);
                }
                break;
            }
            case Sec::Binary:
                for (const auto& t : tok) {
                    touch(t);
                    vars[t].kind = VarKind::Binary;
                }
                break;
            case Sec::General: throw ParseError("general integers are not supported", line_no);
        }
    }
    if (sec == Sec::Obj) {
        std::size_t from = (!stmt.empty() && stmt[0].back() == ':') ? 1 : 0;
        parse_terms(from, stmt.size(), obj);
        stmt.clear();
    }
    if (!stmt.empty()) throw ParseError("incomplete constraint", stmt_line);

    MilpModel m;
    for (const auto& n : order) {
        const auto& v = vars[n];
        m.add_variable(n, v.kind, v.lo, v.hi);
    }
    for (const auto& r : rows) {
        LinearExpr e;
        for (const auto& [n, c] : r.terms) e.add(m.id(n), c);
        m.add_constraint(r.name, std::move(e), r.sense, r.rhs);
    }
    LinearExpr o;
    for (const auto& [n, c] : obj) o.add(m.id(n), c);
    o.constant = obj_constant;
    m.set_objective(std::move(o));
    return m;
}

}  // namespace fortifynet
