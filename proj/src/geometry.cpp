#include "bergman/geometry.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bergman/errors.hpp"

namespace bergman {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

cplx read_point(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(path, "expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

double read_positive(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path, "expected a number");
    double v = j.get<double>();
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path, "must be positive and finite");
    return v;
}

}  // namespace

PlanarDomain::PlanarDomain(Disc outer, std::vector<Disc> holes, std::vector<cplx> punctures)
    : outer_(outer), holes_(std::move(holes)), punctures_(std::move(punctures)) {
    if (!(outer_.radius > 0.0) || !std::isfinite(outer_.radius) || !finite(outer_.center))
        throw DomainError("outer radius must be positive and finite");
    for (std::size_t l = 0; l < holes_.size(); ++l) {
        const Disc& h = holes_[l];
        if (!(h.radius > 0.0) || !finite(h.center))
            throw DomainError("hole " + std::to_string(l) + ": radius must be positive");
        if (!(std::abs(h.center - outer_.center) + h.radius < outer_.radius))
            throw DomainError("hole " + std::to_string(l) + " is not inside the open outer disc");
        for (std::size_t m = 0; m < l; ++m) {
            if (!(std::abs(h.center - holes_[m].center) > h.radius + holes_[m].radius))
                throw DomainError("holes " + std::to_string(m) + " and " + std::to_string(l) + " overlap");
        }
    }
    for (std::size_t i = 0; i < punctures_.size(); ++i) {
        cplx p = punctures_[i];
        if (!finite(p) || !(std::abs(p - outer_.center) < outer_.radius))
            throw DomainError("puncture " + std::to_string(i) + " is not inside the outer disc");
        for (const Disc& h : holes_) {
            if (!(std::abs(p - h.center) > h.radius))
                throw DomainError("puncture " + std::to_string(i) + " lies in a hole");
        }
        for (std::size_t m = 0; m < i; ++m) {
            if (punctures_[m] == p) throw DomainError("duplicate puncture");
        }
    }
}

SignedDistanceValue PlanarDomain::signed_distance(cplx z) const {
    SignedDistanceValue best{outer_.radius - std::abs(z - outer_.center), {ComponentKind::outer, -1}};
    for (std::size_t l = 0; l < holes_.size(); ++l) {
        double v = std::abs(z - holes_[l].center) - holes_[l].radius;
        if (v < best.value) best = {v, {ComponentKind::hole, static_cast<int>(l)}};
    }
    for (std::size_t i = 0; i < punctures_.size(); ++i) {
        double v = std::abs(z - punctures_[i]);
        if (v < best.value) best = {v, {ComponentKind::puncture, static_cast<int>(i)}};
    }
    return best;
}

bool PlanarDomain::contains(cplx z) const {
    if (!(std::abs(z - outer_.center) < outer_.radius)) return false;
    for (const Disc& h : holes_) {
        if (!(std::abs(z - h.center) > h.radius)) return false;
    }
    for (cplx p : punctures_) {
        if (z == p) return false;
    }
    return true;
}

cplx PlanarDomain::project(cplx z, Component c) const {
    auto onto = [&](const Disc& d) {
        cplx v = z - d.center;
        double n = std::abs(v);
        if (n == 0.0) return d.center + d.radius;
        return d.center + v * (d.radius / n);
    };
    switch (c.kind) {
        case ComponentKind::outer: return onto(outer_);
        case ComponentKind::hole: return onto(holes_.at(c.index));
        case ComponentKind::puncture: return punctures_.at(c.index);
    }
    return z;
}

nlohmann::json PlanarDomain::to_json() const {
    nlohmann::json j;
    j["outer"] = {{"center", {outer_.center.real(), outer_.center.imag()}}, {"radius", outer_.radius}};
    j["holes"] = nlohmann::json::array();
    for (const Disc& h : holes_)
        j["holes"].push_back({{"center", {h.center.real(), h.center.imag()}}, {"radius", h.radius}});
    j["punctures"] = nlohmann::json::array();
    for (cplx p : punctures_) j["punctures"].push_back({p.real(), p.imag()});
    return j;
}

PlanarDomain PlanarDomain::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("", "domain must be an object");
    if (!j.contains("outer")) throw ConfigError("/outer", "missing");
    const auto& o = j.at("outer");
    if (!o.is_object() || !o.contains("center") || !o.contains("radius"))
        throw ConfigError("/outer", "expected {center, radius}");
    Disc outer{read_point(o.at("center"), "/outer/center"), read_positive(o.at("radius"), "/outer/radius")};
    std::vector<Disc> holes;
    if (j.contains("holes")) {
        if (!j.at("holes").is_array()) throw ConfigError("/holes", "expected an array");
        for (std::size_t l = 0; l < j.at("holes").size(); ++l) {
            const auto& h = j.at("holes")[l];
            std::string p = "/holes/" + std::to_string(l);
            if (!h.is_object() || !h.contains("center") || !h.contains("radius"))
                throw ConfigError(p, "expected {center, radius}");
            holes.push_back({read_point(h.at("center"), p + "/center"), read_positive(h.at("radius"), p + "/radius")});
        }
    }
    std::vector<cplx> punctures;
    if (j.contains("punctures")) {
        if (!j.at("punctures").is_array()) throw ConfigError("/punctures", "expected an array");
        for (std::size_t i = 0; i < j.at("punctures").size(); ++i)
            punctures.push_back(read_point(j.at("punctures")[i], "/punctures/" + std::to_string(i)));
    }
    for (const auto& item : j.items()) {
        if (item.key() != "outer" && item.key() != "holes" && item.key() != "punctures")
            throw ConfigError("/" + item.key(), "unknown field");
    }
    try {
        return PlanarDomain(outer, std::move(holes), std::move(punctures));
    } catch (const DomainError& e) {
        throw ConfigError("", e.what());
    }
}

bool PlanarDomain::operator==(const PlanarDomain& o) const {
    auto same = [](const Disc& a, const Disc& b) { return a.center == b.center && a.radius == b.radius; };
    if (!same(outer_, o.outer_) || holes_.size() != o.holes_.size() || punctures_ != o.punctures_) return false;
    for (std::size_t l = 0; l < holes_.size(); ++l)
        if (!same(holes_[l], o.holes_[l])) return false;
    return true;
}

NeighborhoodFamily uniform_neighborhood_family(const PlanarDomain& base, const std::vector<double>& schedule) {
    if (schedule.empty()) throw PreconditionError("empty schedule");
    NeighborhoodFamily f{base, schedule, {}, {}, {}};
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        double t = schedule[i];
        if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("schedule values must be positive");
        if (i > 0 && !(t < schedule[i - 1])) throw PreconditionError("schedule must be strictly decreasing");
        std::vector<Disc> holes;
        for (const Disc& h : base.holes()) {
            if (h.radius - t > 0.0) holes.push_back({h.center, h.radius - t});
        }
        f.enlargement.push_back(t);
        f.members.emplace_back(Disc{base.outer().center, base.outer().radius + t}, std::move(holes));
    }
    return f;
}

std::pair<PlanarDomain, NeighborhoodFamily> zalcman_dyadic_family(int j_max) {
    if (j_max < 1) throw PreconditionError("j_max must be at least 1");
    // 2^(-2^(j/3)) drops below the smallest normal double once 2^(j/3) > 1022.
    if (std::exp2(j_max / 3.0) > -static_cast<double>(DBL_MIN_EXP - 1))
        throw ScaleUnderflow("scale underflow: 2^(-2^(j/3)) is subnormal for j = " + std::to_string(j_max));
    std::vector<Disc> holes;
    for (int l = 1; l <= j_max; ++l) holes.push_back({std::ldexp(1.0, -l), std::ldexp(1.0, -3 * l)});
    PlanarDomain base(Disc{0.0, 1.0}, holes);

    NeighborhoodFamily f{base, {}, {}, {}, {cplx(0.0)}};
    for (int j = 1; j <= j_max; ++j) {
        double shrink = std::exp2(-std::exp2(j / 3.0));
        if (j % 3 == 0) shrink = std::ldexp(1.0, -(1 << (j / 3)));
        std::vector<Disc> kept;
        for (int l = 1; l <= j; ++l) {
            double r = std::ldexp(1.0, -3 * l) - shrink;
            if (r > 0.0) kept.push_back({std::ldexp(1.0, -l), r});
        }
        f.schedule.push_back(std::ldexp(1.0, -j));
        f.enlargement.push_back(shrink);
        f.members.emplace_back(Disc{0.0, 1.0 + shrink}, std::move(kept));
    }
    return {base, f};
}

PlanarDomain scaled_zalcman(int holes, double ratio) {
    if (holes < 0) throw PreconditionError("hole count must be nonnegative");
    if (!(ratio > 0.0 && ratio < 1.0 / 3.0)) throw PreconditionError("ratio must lie in (0, 1/3)");
    std::vector<Disc> h;
    for (int l = 1; l <= holes; ++l) h.push_back({std::ldexp(1.0, -l), ratio * std::ldexp(1.0, -l)});
    return PlanarDomain(Disc{0.0, 1.0}, h);
}

std::vector<GapRow> neighborhood_gap_profile(const NeighborhoodFamily& family, const std::vector<cplx>& samples) {
    if (samples.empty()) throw PreconditionError("empty sample list");
    std::vector<cplx> pts;
    pts.reserve(samples.size());
    for (cplx s : samples) {
        bool limit = std::any_of(family.limit_points.begin(), family.limit_points.end(),
                                 [&](cplx p) { return std::abs(p - s) <= 1e-12; });
        if (limit) {
            pts.push_back(s);
            continue;
        }
        auto sd = family.base.signed_distance(s);
        if (std::abs(sd.value) > 1e-12) throw DomainError("sample is not on the boundary of the base domain");
        pts.push_back(family.base.project(s, sd.nearest));
    }
    std::vector<GapRow> rows;
    for (std::size_t i = 0; i < family.size(); ++i) {
        GapRow r{family.schedule[i], -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
        for (cplx p : pts) {
            double v = family.members[i].delta(p);
            r.sup_distance = std::max(r.sup_distance, v);
            r.inf_distance = std::min(r.inf_distance, v);
        }
        rows.push_back(r);
    }
    return rows;
}

double HartogsDomain::fiber_radius(cplx z) const {
    double d = base.delta(z);
    return d > 0.0 ? std::pow(d, alpha) : 0.0;
}

bool HartogsDomain::contains(cplx z, cplx w) const {
    return base.contains(z) && std::abs(w) < fiber_radius(z);
}

bool tube_membership(const TubeDomain& tube, RealPair x, RealPair y) {
    cplx xc(x[0], x[1]);
    if (!tube.base.contains(xc)) return false;
    double d = tube.base.delta(xc);
    return tube.k * (y[0] * y[0] + y[1] * y[1]) < d * d;
}

namespace {

// Intersection points of two circles (empty unless they cross or touch).
std::vector<cplx> circle_intersections(cplx c1, double r1, cplx c2, double r2) {
    double d = std::abs(c2 - c1);
    if (d == 0.0 || d > r1 + r2 || d < std::abs(r1 - r2)) return {};
    double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    double h2 = std::max(0.0, r1 * r1 - a * a);
    cplx u = (c2 - c1) / d;
    cplx m = c1 + a * u;
    double h = std::sqrt(h2);
    return {m + cplx(0.0, h) * u, m - cplx(0.0, h) * u};
}

// Distance from z to S minus the open disc Delta(z0, r), where S is the closed disc
// bounded by circle (c, R) (interior = true) or the closed exterior of that circle.
double distance_to_clipped(cplx z, cplx c, double R, bool interior, cplx z0, double r) {
    double best = std::numeric_limits<double>::infinity();
    double dz = std::abs(z - c);
    cplx q = dz == 0.0 ? c + R : c + (z - c) * (R / dz);
    if (std::abs(q - z0) >= r) best = std::min(best, interior ? std::abs(dz - R) : std::abs(R - dz));
    double d0 = std::abs(z - z0);
    if (d0 > 0.0) {
        cplx p = z0 + (z - z0) * (r / d0);
        double pc = std::abs(p - c);
        if (interior ? pc <= R : pc >= R) best = std::min(best, std::abs(d0 - r));
    }
    for (cplx x : circle_intersections(c, R, z0, r)) best = std::min(best, std::abs(z - x));
    return best;
}

}  // namespace

double distance_with_disc(const PlanarDomain& domain, cplx z0, double r, cplx z) {
    double best = distance_to_clipped(z, domain.outer().center, domain.outer().radius, false, z0, r);
    for (const Disc& h : domain.holes())
        best = std::min(best, distance_to_clipped(z, h.center, h.radius, true, z0, r));
    for (cplx p : domain.punctures()) {
        if (std::abs(p - z0) >= r) best = std::min(best, std::abs(z - p));
    }
    return best;
}

DkBoundReport dk_bound_check(const PlanarDomain& domain, cplx z0, double r_k, int samples) {
    if (!(r_k > 0.0)) throw PreconditionError("r_k must be positive");
    if (2.0 * r_k > std::sqrt(2.0 * r_k)) throw DegenerateAnnulus("degenerate annulus: 2 r_k exceeds sqrt(2 r_k)");
    if (samples < 1) throw PreconditionError("samples must be positive");
    auto sd = domain.signed_distance(z0);
    if (std::abs(sd.value) > 1e-12) throw DomainError("z0 is not a boundary point");
    // r_k must stay below the distance from z0 to every other boundary component.
    auto other = [&](Component c) { return !(c == sd.nearest); };
    {
        double far = std::numeric_limits<double>::infinity();
        if (other({ComponentKind::outer, -1}))
            far = std::min(far, domain.outer().radius - std::abs(z0 - domain.outer().center));
        for (std::size_t l = 0; l < domain.holes().size(); ++l) {
            if (other({ComponentKind::hole, static_cast<int>(l)}))
                far = std::min(far, std::abs(z0 - domain.holes()[l].center) - domain.holes()[l].radius);
        }
        for (std::size_t i = 0; i < domain.punctures().size(); ++i) {
            if (other({ComponentKind::puncture, static_cast<int>(i)}))
                far = std::min(far, std::abs(z0 - domain.punctures()[i]));
        }
        if (!(r_k < far)) throw PreconditionError("r_k reaches another boundary component");
    }

    int n_rad = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples)))));
    int n_ang = std::max(1, (samples + n_rad - 1) / n_rad);
    double lo = 2.0 * r_k, hi = std::sqrt(2.0 * r_k);
    DkBoundReport rep;
    for (int i = 0; i < n_rad; ++i) {
        double rho = lo * std::pow(hi / lo, static_cast<double>(i) / (n_rad - 1));
        for (int m = 0; m < n_ang; ++m) {
            double th = 2.0 * std::numbers::pi * (m + 0.5) / n_ang;
            cplx z = z0 + std::polar(rho, th);
            if (!domain.contains(z)) continue;
            double ratio = distance_with_disc(domain, z0, r_k, z) / domain.delta(z);
            ++rep.samples_used;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_point = z;
            }
        }
    }
    rep.pass = rep.samples_used > 0 && rep.max_ratio <= 3.0 + 1e-9;
    return rep;
}

}  // namespace bergman
