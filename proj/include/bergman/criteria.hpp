#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bergman/geometry.hpp"

namespace bergman {

/// Boundary decay profile eta(t) on (0, r0].
struct EtaProfile {
    enum class Kind { power_law, stretched_exponential, tabulated };

    Kind kind = Kind::power_law;
    double C = 1.0;
    double alpha = 2.0;  // power_law: C t^alpha
    double C1 = 1.0;
    double beta = 0.25;  // stretched_exponential: C exp(-C1 / t^beta)
    std::vector<std::pair<double, double>> samples;  // tabulated (t, eta), any order
    double r0 = 0.5;

    static EtaProfile power_law(double C, double alpha, double r0 = 0.5);
    static EtaProfile stretched_exponential(double C, double C1, double beta, double r0 = 0.5);
    static EtaProfile tabulated(std::vector<std::pair<double, double>> samples, double r0);

    double operator()(double t) const;
    std::string describe() const;
};

enum class Verdict { divergent, convergent, inconclusive };
const char* to_string(Verdict v);

struct PartialIntegral {
    double eps = 0.0;
    double value = 0.0;  // integral of dt / (t log(t / eta)) over [eps, r0]
};

struct Classification {
    Verdict verdict = Verdict::inconclusive;
    std::vector<PartialIntegral> partial_integrals;
    /// Least-squares slopes of I(eps) against log log(1/eps) over the first and last quarter of the schedule.
    double head_slope = 0.0;
    double tail_slope = 0.0;
    std::string reason;
};

/// Throws PreconditionError (naming t) when eta(t) >= t somewhere on (0, r0].
Classification classify_condition_1_1(const EtaProfile& eta, int dyadic_steps = 48);

/// beta < alpha / 2, strict.
bool beta_alpha_gate(double alpha, double beta);

struct LeviRow {
    cplx x;  // real part (x1, x2)
    cplx y;  // imaginary part (y1, y2)
    double min_eigenvalue = 0.0;
    bool skipped = false;  // stencil straddles a distance ridge
};

struct LeviReport {
    std::vector<LeviRow> rows;
    double global_min = 0.0;
    std::size_t skipped = 0;
    bool pass = false;  // global_min >= -1e-6
};

/// Complex Hessian of rho = k|y|^2 - delta_D(x)^2 by central differences in (x1, y1, x2, y2).
/// Samples are (x, y) pairs packed as complex numbers; each must lie in the tube.
LeviReport levi_check_tube(const TubeDomain& tube, const std::vector<std::pair<cplx, cplx>>& samples,
                           double fd_step = 1e-3);

enum class HyperconvexVerdict { consistent, upper_bound_fails, hopf_bound_fails };
const char* to_string(HyperconvexVerdict v);

struct HyperconvexRow {
    cplx boundary_point;
    double delta = 0.0;
    double lower_ratio = 0.0;  // -rho / delta
    double upper_ratio = 0.0;  // -rho / delta^alpha
};

struct HyperconvexReport {
    std::vector<HyperconvexRow> rows;
    double c_fit = 0.0;  // min of -rho / delta over the samples
    /// log10 growth of the ratios from the outermost to the innermost sample, worst boundary point.
    double upper_growth = 0.0;
    double lower_decay = 0.0;
    HyperconvexVerdict verdict = HyperconvexVerdict::consistent;
};

/// Samples z0 + 2^-i n (n the inward normal) for i = i_lo..i_hi at each boundary point z0 and tests
/// -rho >= c delta against -rho <= C delta^alpha. A growth or decay beyond a factor 10 falsifies.
HyperconvexReport hyperconvex_index_falsifier(const PlanarDomain& domain, const std::function<double(cplx)>& rho,
                                              double alpha, const std::vector<cplx>& boundary_points, int i_lo = 4,
                                              int i_hi = 20);

struct AppendixRow {
    int j = 0;
    double t = 0.0;
    double Lambda = 0.0;       // sup over the boundary of D of delta_{D^t}
    double lambda = 0.0;       // inf over the boundary of D of delta_{D^t}
    double lower_bound = 0.0;  // exp(-log 2 / t^(1/3))
    bool closed_forms_agree = false;
    bool pass_planar = false;
    bool pass_tube = false;
    std::size_t tube_samples = 0;
    double tube_Lambda = 0.0;  // largest witness distance over k and samples
};

/// Multiprecision check of the Zalcman-type sandwich for j in [j_lo, j_hi] within 18..24 and tube
/// parameters k. Throws PreconditionError below 18 and ScaleUnderflow above 24.
std::vector<AppendixRow> appendix_verifier(int j_lo = 18, int j_hi = 24, const std::vector<double>& ks = {1.0, 4.0});

}  // namespace bergman
