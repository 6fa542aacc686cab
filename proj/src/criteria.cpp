#include "bergman/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "bergman/errors.hpp"
#include "bergman/quadrature.hpp"

namespace bergman {

// ---- boundary decay classifier ----

EtaProfile EtaProfile::power_law(double C, double alpha, double r0) {
    EtaProfile e;
    e.kind = Kind::power_law;
    e.C = C;
    e.alpha = alpha;
    e.r0 = r0;
    return e;
}

EtaProfile EtaProfile::stretched_exponential(double C, double C1, double beta, double r0) {
    EtaProfile e;
    e.kind = Kind::stretched_exponential;
    e.C = C;
    e.C1 = C1;
    e.beta = beta;
    e.r0 = r0;
    return e;
}

EtaProfile EtaProfile::tabulated(std::vector<std::pair<double, double>> samples, double r0) {
    EtaProfile e;
    e.kind = Kind::tabulated;
    std::sort(samples.begin(), samples.end());
    e.samples = std::move(samples);
    e.r0 = r0;
    return e;
}

double EtaProfile::operator()(double t) const {
    switch (kind) {
        case Kind::power_law: return C * std::pow(t, alpha);
        case Kind::stretched_exponential: return C * std::exp(-C1 / std::pow(t, beta));
        case Kind::tabulated: {
            if (samples.empty() || t < samples.front().first * (1.0 - 1e-12) ||
                t > samples.back().first * (1.0 + 1e-12))
                throw PreconditionError("t = " + std::to_string(t) + " is outside the tabulated range");
            t = std::clamp(t, samples.front().first, samples.back().first);
            auto it = std::lower_bound(samples.begin(), samples.end(), std::make_pair(t, -1.0));
            if (it->first == t) return it->second;
            auto lo = it - 1;
            double s = (std::log(t) - std::log(lo->first)) / (std::log(it->first) - std::log(lo->first));
            return std::exp((1.0 - s) * std::log(lo->second) + s * std::log(it->second));
        }
    }
    return 0.0;
}

std::string EtaProfile::describe() const {
    std::ostringstream o;
    switch (kind) {
        case Kind::power_law: o << "power_law(C=" << C << ", alpha=" << alpha << ")"; break;
        case Kind::stretched_exponential:
            o << "stretched_exponential(C=" << C << ", C1=" << C1 << ", beta=" << beta << ")";
            break;
        case Kind::tabulated: o << "tabulated(" << samples.size() << " samples)"; break;
    }
    o << " on (0, " << r0 << "]";
    return o.str();
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::divergent: return "divergent";
        case Verdict::convergent: return "convergent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

namespace {

[[noreturn]] void eta_violation(double t) {
    std::ostringstream o;
    o.precision(17);
    o << "eta(t) >= t at t = " << t;
    throw PreconditionError(o.str());
}

// Exact check of eta < t on (0, r0] for the closed-form families.
void check_symbolic(const EtaProfile& e) {
    if (!(e.r0 > 0.0 && e.r0 < 1.0)) throw PreconditionError("r0 must lie in (0, 1)");
    if (!(e.C > 0.0)) throw PreconditionError("C must be positive");
    if (e.kind == EtaProfile::Kind::power_law) {
        if (!(e.alpha > 0.0)) throw PreconditionError("alpha must be positive");
        // eta < t  <=>  C t^(alpha-1) < 1.
        if (e.alpha > 1.0) {
            if (!(e.C * std::pow(e.r0, e.alpha - 1.0) < 1.0)) eta_violation(e.r0);
        } else if (e.alpha == 1.0) {
            if (!(e.C < 1.0)) eta_violation(e.r0);
        } else {
            eta_violation(std::min(e.r0, std::pow(e.C, 1.0 / (1.0 - e.alpha))));
        }
        return;
    }
    if (!(e.C1 > 0.0 && e.beta > 0.0)) throw PreconditionError("C1 and beta must be positive");
    // With u = log(1/t): log(t/eta) = g(u) = C1 e^(beta u) - u - log C, convex with minimum at u*.
    double u0 = -std::log(e.r0);
    double ustar = std::log(1.0 / (e.C1 * e.beta)) / e.beta;
    double u = std::max(u0, ustar);
    double g = e.C1 * std::exp(e.beta * u) - u - std::log(e.C);
    if (!(g > 0.0)) eta_violation(std::exp(-u));
}

void check_tabulated(const EtaProfile& e) {
    const auto& s = e.samples;
    if (s.size() < 3) throw PreconditionError("tabulated profile needs at least 3 samples");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s[i].first > 0.0) || !(s[i].second > 0.0)) throw PreconditionError("samples must be positive");
        if (!(s[i].second < s[i].first)) eta_violation(s[i].first);
        if (i > 0 && (s[i].first == s[i - 1].first || s[i].second < s[i - 1].second))
            throw PreconditionError("tabulated eta must be increasing in t");
    }
    if (!(e.r0 <= s.back().first && e.r0 > s.front().first))
        throw PreconditionError("r0 must lie inside the tabulated range");
}

// L(u) = log(t / eta(t)) at t = e^-u.
double log_ratio(const EtaProfile& e, double u) {
    switch (e.kind) {
        case EtaProfile::Kind::power_law: return (e.alpha - 1.0) * u - std::log(e.C);
        case EtaProfile::Kind::stretched_exponential:
            return e.C1 * std::exp(e.beta * u) - u - std::log(e.C);
        case EtaProfile::Kind::tabulated: return -u - std::log(e(std::exp(-u)));
    }
    return 0.0;
}

// Integral of du / L(u) over [a, b].
double segment_integral(const EtaProfile& e, double a, double b) {
    if (e.kind == EtaProfile::Kind::tabulated) {
        // log eta is linear in u between samples, so L is too; integrate piecewise exactly.
        std::vector<double> knots{a};
        for (const auto& s : e.samples) {
            double u = -std::log(s.first);
            if (u > a && u < b) knots.push_back(u);
        }
        knots.push_back(b);
        std::sort(knots.begin(), knots.end());
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            double u1 = knots[i], u2 = knots[i + 1];
            double L1 = log_ratio(e, u1), L2 = log_ratio(e, u2);
            if (std::abs(L2 - L1) <= 1e-14 * std::abs(L1)) sum += (u2 - u1) / L1;
            else sum += (u2 - u1) / (L2 - L1) * std::log(L2 / L1);
        }
        return sum;
    }
    std::vector<double> x, w;
    gauss_legendre(16, x, w);
    double h = 0.5 * (b - a), m = 0.5 * (a + b), sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] / log_ratio(e, m + h * x[i]);
    return h * sum;
}

double ls_slope(const std::vector<PartialIntegral>& rows, std::size_t b, std::size_t e) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = static_cast<double>(e - b);
    for (std::size_t i = b; i < e; ++i) {
        double x = std::log(std::log(1.0 / rows[i].eps)), y = rows[i].value;
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    double den = n * sxx - sx * sx;
    return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

}  // namespace

Classification classify_condition_1_1(const EtaProfile& eta, int dyadic_steps) {
    if (dyadic_steps < 4) throw PreconditionError("need at least 4 dyadic steps");
    if (eta.kind == EtaProfile::Kind::tabulated) check_tabulated(eta);
    else check_symbolic(eta);

    Classification c;
    double u = -std::log(eta.r0), acc = 0.0;
    const double smallest = eta.kind == EtaProfile::Kind::tabulated ? eta.samples.front().first : 0.0;
    for (int m = 1; m <= dyadic_steps; ++m) {
        double eps = eta.r0 * std::exp2(-m);
        if (eps < smallest) break;
        double un = -std::log(eps);
        acc += segment_integral(eta, u, un);
        u = un;
        c.partial_integrals.push_back({eps, acc});
    }
    const std::size_t n = c.partial_integrals.size();
    if (n >= 4) {
        const std::size_t q = std::max<std::size_t>(2, n / 4);
        c.head_slope = ls_slope(c.partial_integrals, 0, q);
        c.tail_slope = ls_slope(c.partial_integrals, n - q, n);
    }

    switch (eta.kind) {
        case EtaProfile::Kind::power_law:
            c.verdict = Verdict::divergent;
            c.reason = "integrand ~ 1/((alpha-1) t log(1/t)) near 0";
            break;
        case EtaProfile::Kind::stretched_exponential:
            c.verdict = Verdict::convergent;
            c.reason = "integrand ~ t^(beta-1)/C1 near 0";
            break;
        case EtaProfile::Kind::tabulated: {
            const double noise = 1e-12 * std::max(1.0, std::abs(acc));
            if (n < 4 || std::abs(c.partial_integrals.back().value - c.partial_integrals.front().value) <= noise) {
                c.verdict = Verdict::inconclusive;
                c.reason = "partial integrals flat within noise";
            } else if (c.tail_slope > noise && c.tail_slope >= 0.5 * c.head_slope) {
                c.verdict = Verdict::divergent;
                c.reason = "partial integrals keep growing linearly in log log(1/eps)";
            } else if (c.tail_slope <= 0.1 * c.head_slope) {
                c.verdict = Verdict::convergent;
                c.reason = "growth against log log(1/eps) dies out";
            } else {
                c.verdict = Verdict::inconclusive;
                c.reason = "slope trend between thresholds";
            }
            break;
        }
    }
    return c;
}

bool beta_alpha_gate(double alpha, double beta) { return beta < 0.5 * alpha; }

// ---- Levi form of the tube function ----

LeviReport levi_check_tube(const TubeDomain& tube, const std::vector<std::pair<cplx, cplx>>& samples,
                           double fd_step) {
    if (!(fd_step > 0.0 && fd_step <= 1e-3)) throw PreconditionError("fd_step must lie in (0, 1e-3]");
    if (!(tube.k > 0.0)) throw PreconditionError("tube parameter k must be positive");
    const PlanarDomain& D = tube.base;
    const double h = fd_step;
    // v = (x1, x2, y1, y2)
    auto rho = [&](const std::array<double, 4>& v) {
        double d = D.delta(cplx(v[0], v[1]));
        return tube.k * (v[2] * v[2] + v[3] * v[3]) - d * d;
    };
    LeviReport rep;
    rep.global_min = std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : samples) {
        if (!tube_membership(tube, {x.real(), x.imag()}, {y.real(), y.imag()}))
            throw DomainError("Levi sample is not in the tube");
        LeviRow row{x, y, 0.0, false};
        const Component c0 = D.signed_distance(x).nearest;
        for (int a = -1; a <= 1 && !row.skipped; ++a)
            for (int b = -1; b <= 1 && !row.skipped; ++b) {
                Component ci = D.signed_distance(x + cplx(a * h, b * h)).nearest;
                if (ci.kind != c0.kind || ci.index != c0.index) row.skipped = true;
            }
        if (row.skipped) {
            ++rep.skipped;
            rep.rows.push_back(row);
            continue;
        }
        const std::array<double, 4> v0{x.real(), x.imag(), y.real(), y.imag()};
        auto at = [&](int i, double di, int j, double dj) {
            auto v = v0;
            v[i] += di;
            v[j] += dj;
            return rho(v);
        };
        const double f0 = rho(v0);
        double H[4][4];
        for (int i = 0; i < 4; ++i) {
            H[i][i] = (at(i, h, i, 0.0) - 2.0 * f0 + at(i, -h, i, 0.0)) / (h * h);
            for (int j = i + 1; j < 4; ++j) {
                H[i][j] = H[j][i] = (at(i, h, j, h) - at(i, h, j, -h) - at(i, -h, j, h) + at(i, -h, j, -h)) / (4 * h * h);
            }
        }
        // d^2 / dz_a dzbar_b = (1/4) [H_xaxb + H_yayb + i (H_xayb - H_yaxb)], x_a -> index a, y_a -> 2 + a.
        Eigen::Matrix2cd M;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                M(a, b) = 0.25 * cplx(H[a][b] + H[2 + a][2 + b], H[a][2 + b] - H[2 + a][b]);
        M = (0.5 * (M + M.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(M, Eigen::EigenvaluesOnly);
        row.min_eigenvalue = es.eigenvalues().minCoeff();
        rep.global_min = std::min(rep.global_min, row.min_eigenvalue);
        rep.rows.push_back(row);
    }
    rep.pass = rep.global_min >= -1e-6;
    return rep;
}

// ---- hyperconvex index ----

const char* to_string(HyperconvexVerdict v) {
    switch (v) {
        case HyperconvexVerdict::consistent: return "consistent";
        case HyperconvexVerdict::upper_bound_fails: return "upper_bound_fails";
        case HyperconvexVerdict::hopf_bound_fails: return "hopf_bound_fails";
    }
    return "consistent";
}

HyperconvexReport hyperconvex_index_falsifier(const PlanarDomain& domain, const std::function<double(cplx)>& rho,
                                              double alpha, const std::vector<cplx>& boundary_points, int i_lo,
                                              int i_hi) {
    if (!(alpha >= 1.0)) throw PreconditionError("alpha must be at least 1");
    if (i_lo < 1 || i_hi <= i_lo || i_hi > 40) throw PreconditionError("need 1 <= i_lo < i_hi <= 40");
    if (boundary_points.empty()) throw PreconditionError("no boundary points");
    HyperconvexReport rep;
    rep.c_fit = std::numeric_limits<double>::infinity();
    rep.upper_growth = -std::numeric_limits<double>::infinity();
    rep.lower_decay = -std::numeric_limits<double>::infinity();
    for (cplx z0 : boundary_points) {
        SignedDistanceValue sd = domain.signed_distance(z0);
        if (std::abs(sd.value) > 1e-12) throw DomainError("point is not on the boundary");
        cplx n = 1.0;
        if (sd.nearest.kind == ComponentKind::outer) {
            n = -(z0 - domain.outer().center) / std::abs(z0 - domain.outer().center);
        } else if (sd.nearest.kind == ComponentKind::hole) {
            cplx c = domain.holes()[sd.nearest.index].center;
            n = (z0 - c) / std::abs(z0 - c);
        }
        double first_lo = 0.0, first_up = 0.0, last_lo = 0.0, last_up = 0.0;
        for (int i = i_lo; i <= i_hi; ++i) {
            cplx z = z0 + std::exp2(-i) * n;
            double d = domain.delta(z);
            if (!(d > 0.0)) throw DomainError("inward sample left the domain");
            double r = rho(z);
            if (!(r < 0.0)) throw PreconditionError("rho must be negative on the samples");
            HyperconvexRow row{z0, d, -r / d, -r / std::pow(d, alpha)};
            rep.c_fit = std::min(rep.c_fit, row.lower_ratio);
            if (i == i_lo) first_lo = row.lower_ratio, first_up = row.upper_ratio;
            last_lo = row.lower_ratio, last_up = row.upper_ratio;
            rep.rows.push_back(row);
        }
        rep.upper_growth = std::max(rep.upper_growth, std::log10(last_up / first_up));
        rep.lower_decay = std::max(rep.lower_decay, std::log10(first_lo / last_lo));
    }
    if (rep.upper_growth > 1.0) rep.verdict = HyperconvexVerdict::upper_bound_fails;
    else if (rep.lower_decay > 1.0) rep.verdict = HyperconvexVerdict::hopf_bound_fails;
    return rep;
}

}  // namespace bergman
