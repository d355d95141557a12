#pragma once

#include <string>
#include <vector>

#include "fortifynet/milp.hpp"

namespace fortifynet {

struct BprParams {
    double alpha = 0.15;
    double beta = 4.0;
};

void check_bpr(const BprParams& p);

/// t0 * (1 + alpha * (flow / capacity)^beta)
double bpr_time(double t0, const BprParams& params, double flow, double capacity);

/// Breakpoints a_i = L + (i/N)(U-L) and values b_i = (a_i / scale)^beta.
struct PlaGrid {
    double lower = 0.0;
    double upper = 1.0;
    int segments = 1;
    double beta = 4.0;
    double scale = 1.0;
    std::vector<double> a;
    std::vector<double> b;

    double function(double x) const;
    /// Piecewise-linear interpolant; x is clamped to [lower, upper].
    double interpolate(double x) const;
};

PlaGrid build_grid(double lower, double upper, int segments, double beta, double scale = 1.0);

/// Largest gap between the interpolant and the function (convex case).
double pla_error_bound(const PlaGrid& grid);

enum class PlaEncoding {
    Sos2Binary,  ///< lambda weights plus N segment binaries with adjacency rows
    ConvexHull   ///< lambda weights only; exact for convex terms pushed downward by the objective
};

/// Rows and columns for  x = sum lam_i a_i,  fx = sum lam_i b_i  over the grid.
/// Variable names: lam(prefix,i), y(prefix,i). Row names carry the prefix as well.
Fragment pla_fragment(const PlaGrid& grid, const std::string& prefix, const std::string& x_var,
                      const std::string& fx_var, PlaEncoding encoding = PlaEncoding::Sos2Binary);

}  // namespace fortifynet
