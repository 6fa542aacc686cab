#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "bergman/geometry.hpp"
#include "bergman/weight.hpp"

namespace bergman {

/// {|z - outer.center| < outer.radius} minus the closed discs in `excluded`.
/// Unlike PlanarDomain the excluded discs may overlap each other and the outer circle;
/// this is what inner parallel sets {delta_D > t} look like.
struct CircleRegion {
    Disc outer;
    std::vector<Disc> excluded;

    static CircleRegion of(const PlanarDomain& d);
    /// {z in D : delta_D(z) > t}.
    static CircleRegion inner_parallel(const PlanarDomain& d, double t);

    /// min over constraints of the signed clearance; positive exactly on the region.
    double clearance(cplx z) const;
    /// Index of the active constraint: -1 for the outer circle, else into `excluded`.
    int active(cplx z) const;
    bool contains(cplx z) const;
};

struct QuadratureOptions {
    int max_depth = 11;
    int min_depth = 5;
    /// Gauss-Legendre points per axis in each cell; 1 is the midpoint rule.
    int order = 4;
    /// Inside cells closer to the boundary than grading * half-diagonal are split.
    double grading = 2.0;
    /// Split cells where the nearest boundary component changes (kinks of delta^a).
    bool ridge_refine = false;
    /// Points whose neighbourhood is refined (punctures, nearby poles).
    std::vector<cplx> focus_points;
    double tolerance = 1e-6;
};

/// Tagged leaf cells of the dyadic decomposition, flattened into weighted nodes.
struct PlanarRule {
    struct BoundaryCell {
        std::size_t begin = 0;
        std::size_t end = 0;
        double area = 0.0;
        bool fallback = false;  // crossed by several circles; resolved by 4x4 membership subsampling
    };

    std::vector<cplx> nodes;
    std::vector<double> weights;
    std::vector<BoundaryCell> boundary_cells;
    std::size_t inside_cells = 0;
    int max_depth = 0;
    double finest_cell = 0.0;  // side length at max_depth

    std::size_t size() const { return nodes.size(); }
};

PlanarRule build_planar_rule(const CircleRegion& region, const QuadratureOptions& opt);

/// Options suited to integrands built from `weight` on `domain`.
QuadratureOptions quadrature_options_for(const PlanarDomain& domain, const Weight& weight, int max_depth);

struct IntegralEstimate {
    cplx value;
    /// Measure of boundary cells times the sampled sup of |integrand * density| there.
    double boundary_mass_bound = 0.0;
    /// Same bound restricted to cells resolved only by membership subsampling.
    double unresolved_bound = 0.0;
    bool resolved = true;
};

/// Sum of f(z_q) * density_q * w_q in fixed pairwise order.
IntegralEstimate integrate_with_rule(const PlanarRule& rule, const std::function<cplx(cplx)>& f,
                                     const std::function<double(cplx)>& density, double tolerance = 1e-6);

IntegralEstimate integrate_planar(const PlanarDomain& domain, const std::function<cplx(cplx)>& integrand,
                                  const Weight& weight, int max_depth);

/// Polar product rule in the fiber |w| < delta(z)^alpha.
struct FiberRule {
    int radial = 8;
    int angular = 16;
};

IntegralEstimate integrate_hartogs(const HartogsDomain& h, const std::function<cplx(cplx, cplx)>& integrand,
                                   int max_depth, FiberRule fiber = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

/// Fixed-order pairwise sum.
double pairwise_sum(const double* v, std::size_t n);
cplx pairwise_sum(const cplx* v, std::size_t n);

}  // namespace bergman
