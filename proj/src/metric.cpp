#include "bergman/metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

double positive_kernel(double K, const std::string& where) {
    if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("kernel diagonal is not positive at " + where);
    return K;
}

std::string point_str(cplx z) { return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")"; }

double log_diagonal(const KernelModel& m, cplx z) {
    if (!m.domain().contains(z)) throw DomainError("metric sample " + point_str(z) + " is outside the domain");
    return std::log(positive_kernel(m.diagonal(z), point_str(z)));
}

double log_diagonal(const HartogsKernel& hk, std::array<cplx, 2> p) {
    double K = hartogs_kernel_eval(hk, p[0], p[1], p[0], p[1]).value.real();
    return std::log(positive_kernel(K, point_str(p[0])));
}

template <class U, class P>
double five_point(const U& u, const P& p, const P& xi, double h) {
    auto shift = [&](cplx step) {
        P q = p;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += step * xi[i];
        return u(q);
    };
    double c = u(p);
    double lap = shift(h) + shift(-h) + shift(cplx(0.0, h)) + shift(cplx(0.0, -h)) - 4.0 * c;
    return std::sqrt(std::max(0.0, 0.25 * lap / (h * h)));
}

template <class Metric, class P>
PathLengthProfile accumulate(const Metric& metric, const std::vector<P>& samples, const std::vector<double>& params) {
    if (samples.size() != params.size()) throw PreconditionError("path samples and parameters differ in length");
    PathLengthProfile out;
    out.s = params;
    out.length.assign(samples.size(), 0.0);
    if (samples.empty()) return out;
    const std::size_t segs = samples.size() - 1;
    std::vector<double> inc(segs, 0.0);
    parallel_for(segs, [&](std::size_t i) {
        P chord = samples[i + 1];
        for (std::size_t c = 0; c < chord.size(); ++c) chord[c] -= samples[i][c];
        inc[i] = 0.5 * (metric(samples[i], chord) + metric(samples[i + 1], chord));
    });
    for (std::size_t i = 0; i < segs; ++i) out.length[i + 1] = out.length[i] + inc[i];
    return out;
}

std::vector<double> dyadic_radii(int k_lo, int k_hi, int samples) {
    if (samples < 1) throw PreconditionError("samples per dyadic step must be positive");
    if (k_lo < 0 || k_hi < k_lo || k_hi > kMaxDyadicIndex)
        throw PreconditionError("dyadic range must satisfy 0 <= k_lo <= k_hi <= " + std::to_string(kMaxDyadicIndex));
    std::vector<double> r;
    const int n = samples * (k_hi - k_lo + 1);
    for (int i = 0; i <= n; ++i) r.push_back(std::exp2(-k_lo - static_cast<double>(i) / samples));
    return r;
}

DecadeProfile split_decades(const PathLengthProfile& p, int k_lo, int k_hi, int samples) {
    DecadeProfile d;
    d.regime = p.regime;
    for (int k = k_lo; k <= k_hi; ++k) {
        auto a = static_cast<std::size_t>((k - k_lo) * samples);
        auto b = a + static_cast<std::size_t>(samples);
        d.k.push_back(k);
        d.increment.push_back(p.length[b] - p.length[a]);
    }
    return d;
}

}  // namespace

MetricValue metric_at(const KernelModel& model, cplx z, cplx direction) {
    if (!model.domain().contains(z)) throw DomainError("metric point " + point_str(z) + " is outside the domain");
    Eigen::VectorXcd y, dy;
    model.coordinates(z, y, dy);
    const double K = positive_kernel(y.squaredNorm(), point_str(z));
    const double levi = (dy.squaredNorm() * K - std::norm(dy.dot(y))) / (K * K);
    return {{z}, {direction}, std::sqrt(std::max(0.0, levi)) * std::abs(direction)};
}

MetricValue metric_at(const HartogsKernel& hk, std::array<cplx, 2> p, std::array<cplx, 2> direction) {
    HartogsJet jet = hartogs_jet(hk, p[0], p[1]);
    const double K = positive_kernel(jet.K, point_str(p[0]));
    double q = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            cplx m = jet.ddK[a][b] / K - jet.dK[a] * std::conj(jet.dK[b]) / (K * K);
            q += (m * direction[a] * std::conj(direction[b])).real();
        }
    return {{p[0], p[1]}, {direction[0], direction[1]}, std::sqrt(std::max(0.0, q))};
}

double metric_fd(const KernelModel& model, cplx z, cplx direction, double h) {
    auto u = [&](const std::array<cplx, 1>& q) { return log_diagonal(model, q[0]); };
    return five_point(u, std::array<cplx, 1>{z}, std::array<cplx, 1>{direction}, h);
}

double metric_fd(const HartogsKernel& hk, std::array<cplx, 2> p, std::array<cplx, 2> direction, double h) {
    auto u = [&](const std::array<cplx, 2>& q) { return log_diagonal(hk, q); };
    return five_point(u, p, direction, h);
}

const char* to_string(EndpointRegime r) {
    switch (r) {
        case EndpointRegime::isolated: return "isolated";
        case EndpointRegime::non_isolated: return "non_isolated";
        case EndpointRegime::interior: return "interior";
    }
    return "interior";
}

EndpointRegime endpoint_regime(const PlanarDomain& base, cplx end, double threshold) {
    SignedDistanceValue sd = base.signed_distance(end);
    if (sd.value > threshold) return EndpointRegime::interior;
    return sd.nearest.kind == ComponentKind::puncture ? EndpointRegime::isolated : EndpointRegime::non_isolated;
}

PathLengthProfile path_length(const KernelModel& model, const std::vector<cplx>& samples,
                              const std::vector<double>& params) {
    for (cplx z : samples)
        if (!model.domain().contains(z)) throw DomainError("path sample " + point_str(z) + " is outside the domain");
    std::vector<std::array<cplx, 1>> pts;
    for (cplx z : samples) pts.push_back({z});
    auto metric = [&](const std::array<cplx, 1>& p, const std::array<cplx, 1>& d) {
        return metric_at(model, p[0], d[0]).value;
    };
    PathLengthProfile out = accumulate(metric, pts, params);
    if (!samples.empty()) out.regime = endpoint_regime(model.domain(), samples.back());
    return out;
}

PathLengthProfile path_length(const HartogsKernel& hk, const std::vector<std::array<cplx, 2>>& samples,
                              const std::vector<double>& params) {
    for (const auto& p : samples)
        if (!hk.domain().contains(p[0], p[1]))
            throw DomainError("path sample " + point_str(p[0]) + " is outside the Hartogs domain");
    auto metric = [&](const std::array<cplx, 2>& p, const std::array<cplx, 2>& d) { return metric_at(hk, p, d).value; };
    PathLengthProfile out = accumulate(metric, samples, params);
    if (!samples.empty()) out.regime = endpoint_regime(hk.domain().base, samples.back()[0]);
    return out;
}

std::vector<cplx> puncture_sequence(const PlanarDomain& d, std::size_t puncture, cplx u, int k_max) {
    if (puncture >= d.punctures().size()) throw PreconditionError("puncture index out of range");
    if (k_max < 1 || k_max > kMaxDyadicIndex) throw PreconditionError("k_max must lie in 1..12");
    if (std::abs(std::abs(u) - 1.0) > 1e-12) throw PreconditionError("approach direction must be a unit vector");
    std::vector<cplx> out;
    for (int k = 1; k <= k_max; ++k) {
        cplx z = d.punctures()[puncture] + std::exp2(-k) * u;
        if (!d.contains(z)) throw DomainError("sequence point " + point_str(z) + " is outside the domain");
        out.push_back(z);
    }
    return out;
}

std::vector<cplx> circle_sequence(const PlanarDomain& d, cplx z0, int k_max) {
    if (k_max < 1 || k_max > kMaxDyadicIndex) throw PreconditionError("k_max must lie in 1..12");
    SignedDistanceValue sd = d.signed_distance(z0);
    if (std::abs(sd.value) > 1e-12 || sd.nearest.kind == ComponentKind::puncture)
        throw PreconditionError("circle sequences start from a point on a boundary circle");
    cplx n;
    if (sd.nearest.kind == ComponentKind::outer) {
        n = (z0 - d.outer().center) / std::abs(z0 - d.outer().center);
    } else {
        const Disc& h = d.holes()[sd.nearest.index];
        n = (h.center - z0) / std::abs(h.center - z0);
    }
    std::vector<cplx> out;
    for (int k = 1; k <= k_max; ++k) {
        cplx z = z0 - std::exp2(-k) * n;
        if (!d.contains(z)) throw DomainError("sequence point " + point_str(z) + " is outside the domain");
        out.push_back(z);
    }
    return out;
}

DecadeProfile decade_increments(const KernelModel& model, cplx target, cplx u, int k_lo, int k_hi, int samples) {
    std::vector<cplx> pts;
    std::vector<double> s;
    auto radii = dyadic_radii(k_lo, k_hi, samples);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        pts.push_back(target + radii[i] * u);
        s.push_back(static_cast<double>(i));
    }
    return split_decades(path_length(model, pts, s), k_lo, k_hi, samples);
}

DecadeProfile decade_increments(const HartogsKernel& hk, cplx target, cplx u, cplx w, int k_lo, int k_hi,
                                int samples) {
    std::vector<std::array<cplx, 2>> pts;
    std::vector<double> s;
    auto radii = dyadic_radii(k_lo, k_hi, samples);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        pts.push_back({target + radii[i] * u, w});
        s.push_back(static_cast<double>(i));
    }
    return split_decades(path_length(hk, pts, s), k_lo, k_hi, samples);
}

KobayashiReport kobayashi_ratio(const KernelModel& model, const Eigen::VectorXcd& coeffs,
                                const std::vector<cplx>& points, int k0) {
    if (coeffs.size() != static_cast<Eigen::Index>(model.dim()))
        throw PreconditionError("coefficient count does not match the basis");
    KobayashiReport rep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        cplx y = points[i];
        if (!model.domain().contains(y)) throw DomainError("sequence point " + point_str(y) + " is outside the domain");
        cplx f = coeffs.cwiseProduct(model.basis().values(y)).sum();
        double K = positive_kernel(model.diagonal(y), point_str(y));
        rep.rows.push_back({k0 + static_cast<int>(i), y, std::norm(f) / K});
    }
    if (rep.rows.size() >= 2) {
        bool monotone = true;
        for (std::size_t i = 1; i < rep.rows.size(); ++i) monotone = monotone && rep.rows[i].ratio <= rep.rows[i - 1].ratio;
        double first = rep.rows.front().ratio, last = rep.rows.back().ratio;
        rep.pass = monotone && first > 0.0 && last <= first / 10.0;
    }
    return rep;
}

BoundaryMassProfile boundary_mass(const KernelModel& model, const std::vector<cplx>& E, const std::vector<double>& t,
                                  int max_depth) {
    if (E.empty()) throw PreconditionError("probe set E is empty");
    for (cplx w : E)
        if (!model.domain().contains(w)) throw DomainError("probe " + point_str(w) + " is outside the domain");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0)) throw PreconditionError("collar widths must be positive");
        if (i > 0 && !(t[i] < t[i - 1])) throw PreconditionError("collar schedule must be strictly decreasing");
    }
    const int depth = max_depth > 0 ? max_depth : model.max_depth();
    const PlanarDomain& d = model.domain();
    auto density = [&](cplx z) { return model.density(z); };

    std::vector<Eigen::VectorXcd> yw;
    std::vector<double> total;
    for (cplx w : E) {
        yw.push_back(model.coordinates(w));
        const auto& y = yw.back();
        auto f = [&](cplx z) { return cplx(std::norm(model.coordinates(z).dot(y))); };
        total.push_back(integrate_with_rule(model.rule(), f, density).value.real());
    }

    BoundaryMassProfile out;
    out.E = E;
    QuadratureOptions opt = quadrature_options_for(d, model.weight(), depth);
    for (const auto& c : model.basis().complement) opt.focus_points.push_back(c.pole);
    for (double ti : t) {
        BoundaryMassRow row;
        row.t = ti;
        CircleRegion inner = CircleRegion::inner_parallel(d, ti);
        const bool empty = inner.outer.radius <= 0.0;
        PlanarRule rule;
        if (!empty) rule = build_planar_rule(inner, opt);
        double finest = empty ? 0.0 : rule.finest_cell;
        for (std::size_t e = 0; e < E.size(); ++e) {
            double in = 0.0, unresolved = 0.0;
            if (!empty) {
                const auto& y = yw[e];
                auto f = [&](cplx z) { return cplx(std::norm(model.coordinates(z).dot(y))); };
                IntegralEstimate est = integrate_with_rule(rule, f, density);
                in = est.value.real();
                unresolved = est.unresolved_bound;
                row.boundary_mass_bound = std::max(row.boundary_mass_bound, est.boundary_mass_bound);
            }
            double nu = total[e] - in;
            if (nu > row.nu) row.nu = nu;
            if (unresolved > 1e-3 * std::max(nu, 0.0)) row.flagged = true;
        }
        if (!empty && ti < 4.0 * finest) row.flagged = true;
        out.rows.push_back(row);
    }

    // Least squares of log nu on log t over unflagged rows.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (const auto& r : out.rows)
        if (!r.flagged && r.nu > 0.0) {
            double x = std::log(r.t), y = std::log(r.nu);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
            ++n;
        }
    out.fitted_rows = n;
    if (n >= 2) {
        double nn = static_cast<double>(n);
        out.r_hat = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
        double b = (sy - out.r_hat * sx) / nn, ss = 0.0;
        for (const auto& r : out.rows)
            if (!r.flagged && r.nu > 0.0) {
                double res = std::log(r.nu) - (out.r_hat * std::log(r.t) + b);
                ss += res * res;
            }
        out.fit_residual = std::sqrt(ss / nn);
    } else {
        out.r_hat = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace bergman
