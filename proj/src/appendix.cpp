// Zalcman-type sandwich e^{-log 2 / t^(1/3)} <= delta_{D^t} <= t and its tube version, in 384-bit binary floating point.
// D = unit disc minus closed discs D(2^-l, 2^-3l), l >= 1 (0 is a boundary point);
// D^{t_j} = D(0, 1 + s_j) minus D(2^-l, 2^-3l - s_j), l <= j, with s_j = 2^(-2^(j/3)).

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bergman/criteria.hpp"
#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

namespace mp = boost::multiprecision;
using Real = mp::number<mp::cpp_bin_float<384, mp::digit_base_2>, mp::et_off>;

struct V2 {
    Real a, b;
};

V2 operator+(const V2& p, const V2& q) { return {p.a + q.a, p.b + q.b}; }
V2 operator-(const V2& p, const V2& q) { return {p.a - q.a, p.b - q.b}; }
V2 operator*(const Real& s, const V2& p) { return {s * p.a, s * p.b}; }
Real norm(const V2& p) { return sqrt(p.a * p.a + p.b * p.b); }

Real pow2(int e) { return ldexp(Real(1), e); }

// Absolute rounding allowance. Quantities are at most 2 in size, so each operation errs by about 2^-383;
// cancellations such as r_l - (r_l - s_j) keep that absolute error. s_j >= 2^-256 stays far above it.
const Real& slack() {
    static const Real v = pow2(-360);
    return v;
}

bool leq_rounded(const Real& a, const Real& b) { return a <= b + slack(); }

struct Setup {
    int j;
    Real t, s, R;
    std::vector<Real> c, r, rt;  // centers, radii in D, radii in D^t (l = 1..j at index l-1)
    std::vector<double> c_d, rt_d;
};

// Double-precision screen: candidates whose rounded value exceeds the rounded minimum by more than this
// cannot attain the exact minimum (all quantities are at most 2, double errors stay below 1e-15).
constexpr double kScreen = 1e-12;

Setup make_setup(int j) {
    Setup S;
    S.j = j;
    S.t = pow2(-j);
    S.s = (j % 3 == 0) ? pow2(-(1 << (j / 3))) : exp(-log(Real(2)) * pow(Real(2), Real(j) / 3));
    S.R = 1 + S.s;
    for (int l = 1; l <= j; ++l) {
        S.c.push_back(pow2(-l));
        S.r.push_back(pow2(-3 * l));
        S.rt.push_back(S.r.back() - S.s);
        if (!(S.rt.back() > 0)) throw PreconditionError("shrunk radius is not positive at l = " + std::to_string(l));
        S.c_d.push_back(S.c.back().convert_to<double>());
        S.rt_d.push_back(S.rt.back().convert_to<double>());
    }
    return S;
}

// delta_{D^t}(x), positive inside.
Real delta_t(const Setup& S, const V2& x) {
    const double xa = x.a.convert_to<double>(), xb = x.b.convert_to<double>();
    std::vector<double> approx(static_cast<std::size_t>(S.j));
    double best = 1.0 + S.s.convert_to<double>() - std::hypot(xa, xb);
    for (int l = 0; l < S.j; ++l) {
        approx[l] = std::hypot(xa - S.c_d[l], xb) - S.rt_d[l];
        best = std::min(best, approx[l]);
    }
    Real d = S.R - norm(x);
    for (int l = 0; l < S.j; ++l)
        if (approx[l] <= best + kScreen) d = std::min(d, norm(x - V2{S.c[l], 0}) - S.rt[l]);
    return d;
}

// delta_D(x) for x in the closure of D, from the full hole sequence.
// Holes with Re x <= 0 never beat the boundary point 0 (|x - c| - c^3 > |x| for 0 < c <= 1/2, |x| < 1).
// Otherwise the lower bounds |x| - c_l - r_l increase in l, so enumeration stops once one reaches the minimum.
Real delta_D(const V2& x) {
    const Real ax = norm(x);
    Real d = std::min(Real(1) - ax, ax);
    if (x.a <= 0) return d;
    for (int l = 1;; ++l) {
        if (l > 4000) throw PreconditionError("hole enumeration did not terminate");
        Real c = pow2(-l), r = pow2(-3 * l);
        if (ax - c - r >= d) break;
        d = std::min(d, norm(x - V2{c, 0}) - r);
    }
    return d;
}

// Range of |p| over the circle |p - a| = rho: [| |a| - rho |, |a| + rho].
struct Range {
    Real lo, hi;
};

Range dist_range_to_point(const V2& a, const Real& rho, const V2& q) {
    Real m = norm(a - q);
    return {abs(m - rho), m + rho};
}

// [inf, upper bound of sup] of delta_{D^t} over the circle |p - a| = rho (rho = 0 is a point).
Range delta_t_range(const Setup& S, const V2& a, const Real& rho) {
    Range out;
    Range o = dist_range_to_point(a, rho, V2{0, 0});
    out.lo = S.R - o.hi;
    out.hi = S.R - o.lo;
    const double aa = a.a.convert_to<double>(), ab = a.b.convert_to<double>(), rd = rho.convert_to<double>();
    std::vector<double> lo(static_cast<std::size_t>(S.j)), hi(lo.size());
    double best_lo = out.lo.convert_to<double>(), best_hi = out.hi.convert_to<double>();
    for (int l = 0; l < S.j; ++l) {
        double m = std::hypot(aa - S.c_d[l], ab);
        lo[l] = std::abs(m - rd) - S.rt_d[l];
        hi[l] = m + rd - S.rt_d[l];
        best_lo = std::min(best_lo, lo[l]);
        best_hi = std::min(best_hi, hi[l]);
    }
    for (int l = 0; l < S.j; ++l) {
        if (lo[l] > best_lo + kScreen && hi[l] > best_hi + kScreen) continue;
        Range h = dist_range_to_point(a, rho, V2{S.c[l], 0});
        out.lo = std::min(out.lo, h.lo - S.rt[l]);
        out.hi = std::min(out.hi, h.hi - S.rt[l]);
    }
    return out;
}

struct TubeResult {
    bool pass = true;
    std::size_t samples = 0;
    double max_witness = 0.0;
};

// Boundary points x + iy of Omega_k: |y| = delta_D(x) / sqrt(k).
TubeResult tube_steps(const Setup& S, const Real& Lambda, const Real& lambda, double k) {
    TubeResult res;
    const Real sk = sqrt(Real(k));
    std::vector<V2> xs;
    for (int l = 1; l <= S.j + 2; ++l) {
        Real c = pow2(-l), r = pow2(-3 * l), gap = pow2(-3 * l - 2);
        xs.push_back({c - r - gap, 0});
        xs.push_back({c, r + gap});
        xs.push_back({c + r, 0});  // on the hole circle, y = 0
    }
    // Unit directions from Pythagorean triples, exact in binary up to one division.
    const V2 units[4] = {{Real(3) / 5, Real(4) / 5}, {Real(-12) / 13, Real(5) / 13}, {Real(8) / 17, Real(-15) / 17},
                         {Real(-7) / 25, Real(-24) / 25}};
    Real gap = pow2(-10);
    for (int i : {0, 1}) xs.push_back((1 - gap) * units[i]);
    xs.push_back({-pow2(-(S.j + 5)), 0});
    xs.push_back({0, pow2(-(S.j + 5))});
    xs.push_back({0, 0});
    xs.push_back({Real(-0.5), Real(0.1)});

    const Real shrink = 1 - pow2(-20);
    const V2 dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    int turn = 0;
    for (const V2& x : xs) {
        ++res.samples;
        const V2& u = units[turn++ % 4];
        Real dD = delta_D(x);
        Real dT = delta_t(S, x);
        V2 y = (dD / sk) * u;

        // delta_D <= delta_{D^t} <= delta_D + Lambda_j(D).
        if (!(leq_rounded(dD, dT) && leq_rounded(dT, dD + Lambda))) res.pass = false;

        // (a) witness z* = x + i y*, |y*| = delta_{D^t}(x) / sqrt(k).
        V2 ys = dD > 0 ? (dT / dD) * y : (dT / sk) * u;
        Real on_boundary = abs(sk * norm(ys) - dT);
        Real wd = norm(y - ys);
        if (!(on_boundary <= slack() && leq_rounded(wd, Lambda / sk) && wd <= S.t)) res.pass = false;
        res.max_witness = std::max(res.max_witness, wd.convert_to<double>());

        // (b) delta_{D^t}(x) >= delta_D(x) + lambda_j(D), then the box around z lies in Omega_k^t.
        if (!leq_rounded(dD + lambda, dT)) res.pass = false;
        for (const V2& ex : dirs) {
            V2 xp = x + (shrink * lambda / 2) * ex;
            Real dTp = delta_t(S, xp);
            if (!(dTp > 0)) {
                res.pass = false;
                continue;
            }
            for (const V2& ey : dirs) {
                V2 yp = y + (shrink * lambda / (2 * sk)) * ey;
                if (!(sk * norm(yp) < dTp)) res.pass = false;
            }
        }
    }
    return res;
}

AppendixRow verify_j(int j, const std::vector<double>& ks) {
    const Setup S = make_setup(j);
    // Boundary components of D: outer circle, holes l >= 1, the point 0. Holes l > j + 64 need no
    // enumeration: over such a circle delta_{D^t} <= c_j - c_l + r_l - rt_j < c_j - rt_j = delta_{D^t}(0),
    // and its infimum exceeds c_j - 2 c_l - rt_j > s_j.
    Real sup_ub = delta_t_range(S, V2{0, 0}, 1).hi;
    Real inf = delta_t_range(S, V2{0, 0}, 1).lo;
    for (int l = 1; l <= j + 64; ++l) {
        Range g = delta_t_range(S, V2{pow2(-l), 0}, pow2(-3 * l));
        sup_ub = std::max(sup_ub, g.hi);
        inf = std::min(inf, g.lo);
    }
    Range zero = delta_t_range(S, V2{0, 0}, 0);
    sup_ub = std::max(sup_ub, zero.hi);
    inf = std::min(inf, zero.lo);

    const Real Lambda_cf = S.c[j - 1] - S.r[j - 1] + S.s;
    const Real lambda_cf = S.s;
    const Real lower = exp(-log(Real(2)) / exp(log(S.t) / 3));

    AppendixRow row;
    row.j = j;
    row.t = S.t.convert_to<double>();
    row.Lambda = sup_ub.convert_to<double>();
    row.lambda = inf.convert_to<double>();
    row.lower_bound = lower.convert_to<double>();
    row.closed_forms_agree = abs(sup_ub - Lambda_cf) <= slack() && abs(inf - lambda_cf) <= slack();
    // Chain for Lambda: c_j - r_j + s_j <= c_j - r_j + r_j = t_j needs s_j <= 2^-3j.
    row.pass_planar = leq_rounded(lower, inf) && sup_ub <= S.t && S.s <= pow2(-3 * j);
    row.pass_tube = true;
    for (double k : ks) {
        TubeResult tr = tube_steps(S, sup_ub, inf, k);
        row.pass_tube = row.pass_tube && tr.pass;
        row.tube_samples += tr.samples;
        row.tube_Lambda = std::max(row.tube_Lambda, tr.max_witness);
    }
    return row;
}

}  // namespace

std::vector<AppendixRow> appendix_verifier(int j_lo, int j_hi, const std::vector<double>& ks) {
    if (j_lo > j_hi) throw PreconditionError("empty j range");
    if (j_lo < 18) throw PreconditionError("j must be at least 18: below it 2^(-2^(j/3)) exceeds 2^(-3j)");
    if (j_hi > 24) throw ScaleUnderflow("j above 24 is outside the supported range");
    for (double k : ks)
        if (!(k >= 1.0)) throw PreconditionError("tube parameter k must be at least 1");
    std::vector<AppendixRow> rows(static_cast<std::size_t>(j_hi - j_lo + 1));
    parallel_for(rows.size(), [&](std::size_t i) { rows[i] = verify_j(j_lo + static_cast<int>(i), ks); });
    return rows;
}

}  // namespace bergman
