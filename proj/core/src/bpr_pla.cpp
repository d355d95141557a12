#include "fortifynet/bpr_pla.hpp"

#include <algorithm>
#include <cmath>

#include "fortifynet/error.hpp"

namespace fortifynet {

void check_bpr(const BprParams& p) {
    if (!(p.alpha > 0)) throw ValidationError("BPR alpha must be positive");
    if (!(p.beta > 1)) throw ValidationError("BPR beta must exceed 1");
}

double bpr_time(double t0, const BprParams& params, double flow, double capacity) {
    if (!(capacity > 0)) throw ValidationError("capacity must be positive");
    return t0 * (1.0 + params.alpha * std::pow(flow / capacity, params.beta));
}

double PlaGrid::function(double x) const { return std::pow(x / scale, beta); }

double PlaGrid::interpolate(double x) const {
    x = std::clamp(x, lower, upper);
    const double width = (upper - lower) / segments;
    int i = static_cast<int>(std::floor((x - lower) / width));
    i = std::clamp(i, 0, segments - 1);
    const double t = (x - a[i]) / (a[i + 1] - a[i]);
    if (t <= 0.0) return b[i];
    if (t >= 1.0) return b[i + 1];
    return b[i] + t * (b[i + 1] - b[i]);
}

PlaGrid build_grid(double lower, double upper, int segments, double beta, double scale) {
    if (!(lower >= 0)) throw ValidationError("PLA lower bound must be nonnegative");
    if (!(upper > lower)) throw ValidationError("PLA upper bound must exceed the lower bound");
    if (segments < 1) throw ValidationError("PLA needs at least one segment");
    if (!(scale > 0)) throw ValidationError("PLA scale must be positive");
    PlaGrid g;
    g.lower = lower;
    g.upper = upper;
    g.segments = segments;
    g.beta = beta;
    g.scale = scale;
    g.a.resize(static_cast<std::size_t>(segments) + 1);
    g.b.resize(g.a.size());
    for (int i = 0; i <= segments; ++i) {
        g.a[i] = i == segments ? upper : lower + (static_cast<double>(i) / segments) * (upper - lower);
        g.b[i] = g.function(g.a[i]);
    }
    return g;
}

double pla_error_bound(const PlaGrid& g) {
    if (!(g.beta > 1)) throw ValidationError("error bound requires beta > 1");
    double worst = 0.0;
    const double sb = std::pow(g.scale, g.beta);
    for (int i = 0; i < g.segments; ++i) {
        const double x0 = g.a[i], x1 = g.a[i + 1];
        const double m = (g.b[i + 1] - g.b[i]) / (x1 - x0);
        // f'(x) = beta x^(beta-1) / scale^beta equals the secant slope at x*.
        double xs = std::pow(m * sb / g.beta, 1.0 / (g.beta - 1.0));
        xs = std::clamp(xs, x0, x1);
        const double gap = g.b[i] + m * (xs - x0) - g.function(xs);
        worst = std::max(worst, gap);
    }
    return worst;
}

Fragment pla_fragment(const PlaGrid& g, const std::string& prefix, const std::string& x_var,
                      const std::string& fx_var, PlaEncoding encoding) {
    const int n = g.segments;
    auto lam = [&](int i) { return "lam(" + prefix + "," + std::to_string(i) + ")"; };
    auto y = [&](int i) { return "y(" + prefix + "," + std::to_string(i) + ")"; };
    Fragment f;
    for (int i = 0; i <= n; ++i) f.variables.push_back({lam(i), VarKind::Continuous, 0.0, kInf});

    Fragment::Row sum{"lsum(" + prefix + ")", {}, Sense::Equal, 1.0};
    for (int i = 0; i <= n; ++i) sum.terms.emplace_back(lam(i), 1.0);
    f.rows.push_back(std::move(sum));

    if (encoding == PlaEncoding::Sos2Binary) {
        for (int i = 1; i <= n; ++i) f.variables.push_back({y(i), VarKind::Binary, 0.0, 1.0});
        Fragment::Row ysum{"ysum(" + prefix + ")", {}, Sense::Equal, 1.0};
        for (int i = 1; i <= n; ++i) ysum.terms.emplace_back(y(i), 1.0);
        f.rows.push_back(std::move(ysum));
        for (int i = 0; i <= n; ++i) {
            Fragment::Row adj{"adj(" + prefix + "," + std::to_string(i) + ")", {{lam(i), 1.0}}, Sense::LessEqual, 0.0};
            if (i >= 1) adj.terms.emplace_back(y(i), -1.0);
            if (i + 1 <= n) adj.terms.emplace_back(y(i + 1), -1.0);
            f.rows.push_back(std::move(adj));
        }
    }

    Fragment::Row xr{"px(" + prefix + ")", {{x_var, 1.0}}, Sense::Equal, 0.0};
    Fragment::Row fr{"pf(" + prefix + ")", {{fx_var, 1.0}}, Sense::Equal, 0.0};
    for (int i = 0; i <= n; ++i) {
        if (g.a[i] != 0.0) xr.terms.emplace_back(lam(i), -g.a[i]);
        if (g.b[i] != 0.0) fr.terms.emplace_back(lam(i), -g.b[i]);
    }
    f.rows.push_back(std::move(xr));
    f.rows.push_back(std::move(fr));
    return f;
}

}  // namespace fortifynet
