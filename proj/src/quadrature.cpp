#include "bergman/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

std::string Weight::describe() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::neg_log_distance: return "neg_log_distance(alpha=" + std::to_string(alpha) + ")";
        case Kind::fiber_scaled:
            return "fiber_scaled(alpha=" + std::to_string(alpha) + ", j=" + std::to_string(j) + ")";
    }
    return "?";
}

Weight Weight::neg_log_distance(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("alpha must be positive");
    return {Kind::neg_log_distance, alpha, 0};
}

Weight Weight::fiber_scaled(double alpha, int j) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("alpha must be positive");
    if (j < 0) throw PreconditionError("fiber index must be nonnegative");
    return {Kind::fiber_scaled, alpha, j};
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    static std::mutex cache_mutex;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(n);
        if (it != cache.end()) {
            x = it->second.first;
            w = it->second.second;
            return;
        }
    }
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) x[n / 2] = 0.0;
    std::lock_guard<std::mutex> lock(cache_mutex);
    cache[n] = {x, w};
}

namespace {

template <class T>
T pairwise(const T* v, std::size_t n) {
    if (n <= 8) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise(v, h) + pairwise(v + h, n - h);
}

}  // namespace

double pairwise_sum(const double* v, std::size_t n) { return pairwise(v, n); }
cplx pairwise_sum(const cplx* v, std::size_t n) { return pairwise(v, n); }

CircleRegion CircleRegion::of(const PlanarDomain& d) {
    CircleRegion r{d.outer(), d.holes()};
    for (cplx p : d.punctures()) r.excluded.push_back({p, 0.0});
    return r;
}

CircleRegion CircleRegion::inner_parallel(const PlanarDomain& d, double t) {
    CircleRegion r{{d.outer().center, d.outer().radius - t}, {}};
    for (const Disc& h : d.holes()) r.excluded.push_back({h.center, h.radius + t});
    for (cplx p : d.punctures()) r.excluded.push_back({p, t});
    return r;
}

double CircleRegion::clearance(cplx z) const {
    double v = outer.radius - std::abs(z - outer.center);
    for (const Disc& e : excluded) v = std::min(v, std::abs(z - e.center) - e.radius);
    return v;
}

int CircleRegion::active(cplx z) const {
    double v = outer.radius - std::abs(z - outer.center);
    int idx = -1;
    for (std::size_t i = 0; i < excluded.size(); ++i) {
        double u = std::abs(z - excluded[i].center) - excluded[i].radius;
        if (u < v) v = u, idx = static_cast<int>(i);
    }
    return idx;
}

bool CircleRegion::contains(cplx z) const {
    if (!(std::abs(z - outer.center) < outer.radius)) return false;
    for (const Disc& e : excluded)
        if (!(std::abs(z - e.center) > e.radius)) return false;
    return true;
}

namespace {

struct Builder {
    const CircleRegion& region;
    const QuadratureOptions& opt;
    PlanarRule& rule;
    std::vector<double> gx, gw;

    void emit(cplx z, double w) {
        rule.nodes.push_back(z);
        rule.weights.push_back(w);
    }

    void tensor(double x0, double y0, double h) {
        int p = static_cast<int>(gx.size());
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                emit({x0 + 0.5 * h * (1.0 + gx[a]), y0 + 0.5 * h * (1.0 + gx[b])}, 0.25 * h * h * gw[a] * gw[b]);
    }

    static bool crosses(const Disc& d, double x0, double y0, double h) {
        if (d.radius <= 0.0) return false;
        double cx = d.center.real(), cy = d.center.imag();
        double dx = std::max({x0 - cx, 0.0, cx - (x0 + h)});
        double dy = std::max({y0 - cy, 0.0, cy - (y0 + h)});
        double dmin = std::hypot(dx, dy);
        double fx = std::max(std::abs(x0 - cx), std::abs(x0 + h - cx));
        double fy = std::max(std::abs(y0 - cy), std::abs(y0 + h - cy));
        double dmax = std::hypot(fx, fy);
        return dmin < d.radius && d.radius < dmax;
    }

    // Region side of one circle inside the square, integrated as a graph domain.
    void cut(const Disc& d, bool keep_inside, double x0, double y0, double h) {
        cplx m(x0 + 0.5 * h, y0 + 0.5 * h);
        cplx n = m - d.center;
        bool swap = std::abs(n.imag()) < std::abs(n.real());
        // (u, v) = (x, y) or (y, x); u is the outer variable.
        double u0 = swap ? y0 : x0, v0 = swap ? x0 : y0;
        double u1 = u0 + h, v1 = v0 + h;
        double cu = swap ? d.center.imag() : d.center.real();
        double cv = swap ? d.center.real() : d.center.imag();
        double r = d.radius;

        std::vector<double> br{u0, u1};
        auto add = [&](double u) {
            if (u > u0 && u < u1) br.push_back(u);
        };
        add(cu - r);
        add(cu + r);
        for (double ve : {v0, v1}) {
            double q = r * r - (ve - cv) * (ve - cv);
            if (q >= 0.0) {
                add(cu - std::sqrt(q));
                add(cu + std::sqrt(q));
            }
        }
        std::sort(br.begin(), br.end());
        int p = static_cast<int>(gx.size());
        for (std::size_t s = 0; s + 1 < br.size(); ++s) {
            double a = br[s], b = br[s + 1];
            if (!(b > a)) continue;
            for (int i = 0; i < p; ++i) {
                double u = a + 0.5 * (b - a) * (1.0 + gx[i]);
                double wu = 0.5 * (b - a) * gw[i];
                double q = r * r - (u - cu) * (u - cu);
                std::array<std::pair<double, double>, 2> iv;
                int count = 0;
                if (q > 0.0) {
                    double hw = std::sqrt(q);
                    if (keep_inside) {
                        iv[count++] = {std::max(v0, cv - hw), std::min(v1, cv + hw)};
                    } else {
                        iv[count++] = {v0, std::min(v1, cv - hw)};
                        iv[count++] = {std::max(v0, cv + hw), v1};
                    }
                } else if (!keep_inside) {
                    iv[count++] = {v0, v1};
                }
                for (int c = 0; c < count; ++c) {
                    double lo = iv[c].first, hi = iv[c].second;
                    if (!(hi > lo)) continue;
                    for (int k = 0; k < p; ++k) {
                        double v = lo + 0.5 * (hi - lo) * (1.0 + gx[k]);
                        double w = wu * 0.5 * (hi - lo) * gw[k];
                        emit(swap ? cplx(v, u) : cplx(u, v), w);
                    }
                }
            }
        }
    }

    void subsample(double x0, double y0, double h) {
        double s = h / 4.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                cplx z(x0 + (a + 0.5) * s, y0 + (b + 0.5) * s);
                if (region.contains(z)) emit(z, s * s);
            }
    }

    void boundary_leaf(double x0, double y0, double h) {
        PlanarRule::BoundaryCell cell{rule.nodes.size(), 0, h * h, false};
        cplx m(x0 + 0.5 * h, y0 + 0.5 * h);
        std::vector<int> crossing;  // -1 is the outer circle
        if (crosses(region.outer, x0, y0, h)) crossing.push_back(-1);
        for (std::size_t i = 0; i < region.excluded.size(); ++i)
            if (crosses(region.excluded[i], x0, y0, h)) crossing.push_back(static_cast<int>(i));

        if (crossing.empty()) {
            if (region.contains(m)) tensor(x0, y0, h);
        } else if (crossing.size() == 1) {
            int c = crossing[0];
            bool blocked = false;
            if (c != -1 && !(std::abs(m - region.outer.center) < region.outer.radius)) blocked = true;
            for (std::size_t i = 0; i < region.excluded.size() && !blocked; ++i) {
                if (static_cast<int>(i) == c) continue;
                const Disc& e = region.excluded[i];
                if (!(std::abs(m - e.center) > e.radius)) blocked = true;
            }
            if (!blocked) {
                if (c == -1)
                    cut(region.outer, true, x0, y0, h);
                else
                    cut(region.excluded[c], false, x0, y0, h);
            }
        } else {
            cell.fallback = true;
            subsample(x0, y0, h);
        }
        cell.end = rule.nodes.size();
        if (cell.end > cell.begin || cell.fallback) rule.boundary_cells.push_back(cell);
    }

    bool ridge(double x0, double y0, double h) const {
        cplx oc = region.outer.center;
        if (oc.real() >= x0 && oc.real() <= x0 + h && oc.imag() >= y0 && oc.imag() <= y0 + h) return true;
        int a = region.active({x0 + 0.5 * h, y0 + 0.5 * h});
        const std::array<cplx, 4> corners{cplx(x0, y0), cplx(x0 + h, y0), cplx(x0, y0 + h), cplx(x0 + h, y0 + h)};
        for (cplx c : corners)
            if (region.active(c) != a) return true;
        return false;
    }

    void run(double x0, double y0, double h, int depth) {
        cplx m(x0 + 0.5 * h, y0 + 0.5 * h);
        double hd = h * std::numbers::sqrt2 / 2.0;
        double s = region.clearance(m);
        if (s < -hd) return;
        bool boundary = s <= hd;
        bool split = false;
        if (depth < opt.max_depth) {
            split = depth < opt.min_depth || boundary || s < opt.grading * hd;
            for (std::size_t i = 0; i < opt.focus_points.size() && !split; ++i)
                if (std::abs(m - opt.focus_points[i]) < 3.0 * hd) split = true;
            if (!split && opt.ridge_refine && ridge(x0, y0, h)) split = true;
        }
        if (split) {
            double q = 0.5 * h;
            run(x0, y0, q, depth + 1);
            run(x0 + q, y0, q, depth + 1);
            run(x0, y0 + q, q, depth + 1);
            run(x0 + q, y0 + q, q, depth + 1);
            return;
        }
        if (boundary) {
            boundary_leaf(x0, y0, h);
        } else {
            tensor(x0, y0, h);
            ++rule.inside_cells;
        }
    }
};

}  // namespace

PlanarRule build_planar_rule(const CircleRegion& region, const QuadratureOptions& opt) {
    if (opt.max_depth < 0 || opt.max_depth > 14) throw PreconditionError("max_depth must lie in [0, 14]");
    if (opt.order < 1 || opt.order > 16) throw PreconditionError("quadrature order must lie in [1, 16]");
    PlanarRule rule;
    rule.max_depth = opt.max_depth;
    double side = 2.0 * region.outer.radius;
    rule.finest_cell = std::ldexp(side, -opt.max_depth);
    if (!(region.outer.radius > 0.0)) return rule;
    Builder b{region, opt, rule, {}, {}};
    gauss_legendre(opt.order, b.gx, b.gw);
    cplx c = region.outer.center;
    b.run(c.real() - region.outer.radius, c.imag() - region.outer.radius, side, 0);
    return rule;
}

QuadratureOptions quadrature_options_for(const PlanarDomain& domain, const Weight& weight, int max_depth) {
    QuadratureOptions o;
    o.max_depth = max_depth;
    o.min_depth = std::min(o.min_depth, max_depth);
    o.ridge_refine = weight.distance_based();
    o.focus_points = domain.punctures();
    return o;
}

IntegralEstimate integrate_with_rule(const PlanarRule& rule, const std::function<cplx(cplx)>& f,
                                     const std::function<double(cplx)>& density, double tolerance) {
    const std::size_t n = rule.size();
    constexpr std::size_t chunk = 4096;
    std::size_t chunks = (n + chunk - 1) / chunk;
    std::vector<cplx> terms(n);
    std::vector<cplx> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t b = c * chunk, e = std::min(n, b + chunk);
        for (std::size_t q = b; q < e; ++q) terms[q] = f(rule.nodes[q]) * density(rule.nodes[q]);
        std::vector<cplx> wt(e - b);
        for (std::size_t q = b; q < e; ++q) wt[q - b] = terms[q] * rule.weights[q];
        partial[c] = pairwise_sum(wt.data(), wt.size());
    });
    IntegralEstimate est;
    est.value = pairwise_sum(partial.data(), partial.size());
    for (const auto& cell : rule.boundary_cells) {
        double sup = 0.0;
        for (std::size_t q = cell.begin; q < cell.end; ++q) sup = std::max(sup, std::abs(terms[q]));
        est.boundary_mass_bound += cell.area * sup;
        if (cell.fallback) est.unresolved_bound += cell.area * sup;
    }
    est.resolved = est.unresolved_bound <= tolerance * std::max(1.0, std::abs(est.value));
    return est;
}

IntegralEstimate integrate_planar(const PlanarDomain& domain, const std::function<cplx(cplx)>& integrand,
                                  const Weight& weight, int max_depth) {
    auto opt = quadrature_options_for(domain, weight, max_depth);
    PlanarRule rule = build_planar_rule(CircleRegion::of(domain), opt);
    return integrate_with_rule(
        rule, integrand, [&](cplx z) { return weight.density(domain.delta(z)); }, opt.tolerance);
}

IntegralEstimate integrate_hartogs(const HartogsDomain& h, const std::function<cplx(cplx, cplx)>& integrand,
                                   int max_depth, FiberRule fiber) {
    if (fiber.radial < 1 || fiber.angular < 1) throw PreconditionError("fiber rule sizes must be positive");
    auto opt = quadrature_options_for(h.base, Weight::neg_log_distance(h.alpha), max_depth);
    PlanarRule rule = build_planar_rule(CircleRegion::of(h.base), opt);
    std::vector<double> gx, gw;
    gauss_legendre(fiber.radial, gx, gw);
    const double dth = 2.0 * std::numbers::pi / fiber.angular;
    std::vector<cplx> unit(fiber.angular);
    for (int m = 0; m < fiber.angular; ++m) unit[m] = std::polar(1.0, m * dth);
    auto fiber_integral = [&](cplx z) {
        double R = h.fiber_radius(z);
        std::vector<cplx> acc(static_cast<std::size_t>(fiber.radial) * fiber.angular);
        std::size_t i = 0;
        for (int k = 0; k < fiber.radial; ++k) {
            double rho = 0.5 * R * (1.0 + gx[k]);
            double wr = 0.5 * R * gw[k] * rho * dth;
            for (int m = 0; m < fiber.angular; ++m) acc[i++] = integrand(z, rho * unit[m]) * wr;
        }
        return pairwise_sum(acc.data(), acc.size());
    };
    return integrate_with_rule(rule, fiber_integral, [](cplx) { return 1.0; }, opt.tolerance);
}

}  // namespace bergman
