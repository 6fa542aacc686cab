#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "bergman/kernel.hpp"

namespace bergman {

/// Basis for fiber j, whose weight is fiber_scaled(alpha, j).
using FiberBasisRule = std::function<BasisSpec(int j, const Weight& weight)>;

/// BasisSpec::standard(base, weight, N, M) for every fiber.
FiberBasisRule standard_fiber_basis(const PlanarDomain& base, int N, int M);

/// Truncated series sum_j (j+1)/pi K_{D, 2(j+1)phi}(z, t) (w conj(s))^j over fiber models j = 0..J.
class HartogsKernel {
public:
    const HartogsDomain& domain() const { return domain_; }
    int J() const { return static_cast<int>(fibers_.size()) - 1; }
    const KernelModel& fiber(int j) const { return fibers_.at(static_cast<std::size_t>(j)); }
    const std::vector<KernelModel>& fibers() const { return fibers_; }

private:
    friend HartogsKernel build_hartogs_kernel(const HartogsDomain&, int, const FiberBasisRule&, int);
    HartogsDomain domain_;
    std::vector<KernelModel> fibers_;
};

HartogsKernel build_hartogs_kernel(const HartogsDomain& h, int J, const FiberBasisRule& rule, int max_depth);

/// Largest fiber index ever summed.
constexpr int kMaxSeriesIndex = 60;
constexpr double kSeriesTarget = 1e-8;

struct HartogsValue {
    cplx value;
    double tail_bound = 0.0;
    int terms = 0;           // number of series terms summed
    bool tail_flag = false;  // tail_bound > 1e-6 |value|
};

/// Sums terms until the geometric tail estimate drops below 1e-8 |value| or the built fibers run out
/// (index capped at 60, or at `max_index` when nonnegative). Throws DomainError for non-member points.
HartogsValue hartogs_kernel_eval(const HartogsKernel& hk, cplx z, cplx w, cplx t, cplx s, int max_index = -1);

/// Derivative data of the diagonal series at (z, w), for the metric.
struct HartogsJet {
    double K = 0.0;
    cplx dK[2];          // d/dz K, d/dw K
    cplx ddK[2][2];      // d_a dbar_b K
    int terms = 0;
    double tail_bound = 0.0;
};

HartogsJet hartogs_jet(const HartogsKernel& hk, cplx z, cplx w);

/// Reference kernel of a Hartogs domain from monomials z^n w^j, n <= N, j <= J, weight 1.
class Kernel2DModel {
public:
    double diagonal(cplx z, cplx w) const;
    cplx eval(cplx z, cplx w, cplx t, cplx s) const;
    /// Unnormalized Gram entry <z^n w^j, z^m w^i>.
    cplx gram_entry(int n, int j, int m, int i) const;
    int N() const { return N_; }
    int J() const { return J_; }
    double jitter_used() const { return jitter_; }

private:
    friend Kernel2DModel hartogs_direct_oracle(const HartogsDomain&, int, int, int, FiberRule, int);
    Eigen::VectorXcd coordinates(cplx z, cplx w) const;
    HartogsDomain domain_;
    int N_ = 0, J_ = 0;
    Eigen::VectorXd scales_;
    Eigen::MatrixXcd gram_;
    Eigen::MatrixXcd factor_;
    double jitter_ = 0.0;
};

Kernel2DModel hartogs_direct_oracle(const HartogsDomain& h, int degree_z, int degree_w, int max_depth,
                                    FiberRule fiber = {}, int planar_order = 4);

/// f(z, w) = sum_j f_j(z) w^j, f_j given by coefficients over `basis`.
struct HartogsFunction {
    BasisSpec basis;
    std::vector<Eigen::VectorXcd> slices;

    cplx operator()(cplx z, cplx w) const;
};

struct NormDecomposition {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

NormDecomposition norm_decomposition_check(const HartogsDomain& h, const HartogsFunction& f, int max_depth);

struct ExhaustionRow {
    cplx z, w;
    double value = 0.0;
    double lower_bound = 0.0;
    bool pass = false;
};

std::vector<ExhaustionRow> exhaustion_lower_bound_check(const HartogsKernel& hk,
                                                        const std::vector<std::array<cplx, 2>>& probes);

}  // namespace bergman
