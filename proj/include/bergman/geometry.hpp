#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bergman {

using cplx = std::complex<double>;

struct Disc {
    cplx center;
    double radius = 0.0;
};

enum class ComponentKind { outer, hole, puncture };

/// Boundary component: the outer circle, hole `index` or puncture `index`.
struct Component {
    ComponentKind kind = ComponentKind::outer;
    int index = -1;
    bool operator==(const Component&) const = default;
};

struct SignedDistanceValue {
    double value = 0.0;
    Component nearest;
};

/// Open disc minus finitely many closed discs and points.
///
/// Holes must have pairwise disjoint closures inside the open outer disc.
/// Punctures are interior points of the outer disc off every hole closure.
class PlanarDomain {
public:
    PlanarDomain() : PlanarDomain(Disc{0.0, 1.0}) {}
    explicit PlanarDomain(Disc outer, std::vector<Disc> holes = {}, std::vector<cplx> punctures = {});

    static PlanarDomain unit_disc() { return PlanarDomain(Disc{0.0, 1.0}); }
    static PlanarDomain punctured_disc() { return PlanarDomain(Disc{0.0, 1.0}, {}, {cplx(0.0)}); }

    const Disc& outer() const { return outer_; }
    const std::vector<Disc>& holes() const { return holes_; }
    const std::vector<cplx>& punctures() const { return punctures_; }

    SignedDistanceValue signed_distance(cplx z) const;
    double delta(cplx z) const { return signed_distance(z).value; }
    bool contains(cplx z) const;

    /// Nearest point of the boundary component `c` to z.
    cplx project(cplx z, Component c) const;

    nlohmann::json to_json() const;
    static PlanarDomain from_json(const nlohmann::json& j);

    bool operator==(const PlanarDomain&) const;

private:
    Disc outer_;
    std::vector<Disc> holes_;
    std::vector<cplx> punctures_;
};

inline SignedDistanceValue signed_distance(const PlanarDomain& d, cplx z) { return d.signed_distance(z); }

/// Stein-neighbourhood style family: members grow the outer disc and shrink the holes.
struct NeighborhoodFamily {
    PlanarDomain base;
    std::vector<double> schedule;     // strictly decreasing parameters t
    std::vector<double> enlargement;  // amount added to the outer radius / removed from hole radii
    std::vector<PlanarDomain> members;
    /// Accumulation points of boundary components not carried by `base` (sample these too).
    std::vector<cplx> limit_points;

    std::size_t size() const { return members.size(); }
};

/// Members D_t = D(c, R+t) minus discs of radius r_l - t (dropped when <= 0); punctures are filled.
NeighborhoodFamily uniform_neighborhood_family(const PlanarDomain& base, const std::vector<double>& schedule);

/// Disc minus holes at x_l = 2^-l of radius 2^-3l, l <= j_max, with members for t_j = 2^-j.
std::pair<PlanarDomain, NeighborhoodFamily> zalcman_dyadic_family(int j_max);

/// Desk-scale Zalcman-type domain: holes at 2^-l of radius ratio * 2^-l, l = 1..holes.
PlanarDomain scaled_zalcman(int holes = 3, double ratio = 0.2);

struct GapRow {
    double t = 0.0;
    double sup_distance = 0.0;  // Lambda-hat
    double inf_distance = 0.0;  // lambda-hat
};

std::vector<GapRow> neighborhood_gap_profile(const NeighborhoodFamily& family, const std::vector<cplx>& samples);

struct HartogsDomain {
    PlanarDomain base;
    double alpha = 1.0;

    double fiber_radius(cplx z) const;
    bool contains(cplx z, cplx w) const;
};

/// {x + iy in C^2 : x in D, k|y|^2 < delta_D(x)^2}, D read as a subset of R^2.
struct TubeDomain {
    PlanarDomain base;
    double k = 1.0;
};

using RealPair = std::array<double, 2>;

bool tube_membership(const TubeDomain& tube, RealPair x, RealPair y);

/// Boundary distance of D u Delta(z0, r) at z, where Delta is the open disc.
double distance_with_disc(const PlanarDomain& domain, cplx z0, double r, cplx z);

struct DkBoundReport {
    double max_ratio = 0.0;
    cplx worst_point;
    int samples_used = 0;
    bool pass = false;
};

DkBoundReport dk_bound_check(const PlanarDomain& domain, cplx z0, double r_k, int samples);

}  // namespace bergman
