#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "bergman/hartogs.hpp"
#include "bergman/kernel.hpp"

namespace bergman {

/// sqrt of the Levi form of log K at `point` applied to `direction`.
struct MetricValue {
    std::vector<cplx> point;
    std::vector<cplx> direction;
    double value = 0.0;
};

/// Exact basis derivatives. Throws DomainError when K(z, z) <= 0.
MetricValue metric_at(const KernelModel& model, cplx z, cplx direction);
MetricValue metric_at(const HartogsKernel& hk, std::array<cplx, 2> p, std::array<cplx, 2> direction);

/// Five-point Laplacian of log K along the complex line through the point, step h.
double metric_fd(const KernelModel& model, cplx z, cplx direction, double h = 1e-4);
double metric_fd(const HartogsKernel& hk, std::array<cplx, 2> p, std::array<cplx, 2> direction, double h = 1e-4);

enum class EndpointRegime { isolated, non_isolated, interior };
const char* to_string(EndpointRegime r);

/// Classifies where a path ends relative to the base domain boundary.
EndpointRegime endpoint_regime(const PlanarDomain& base, cplx end, double threshold = 1e-2);

struct PathLengthProfile {
    std::vector<double> s;
    std::vector<double> length;  // cumulative, length[0] = 0
    EndpointRegime regime = EndpointRegime::interior;
};

/// Trapezoidal accumulation over segments; each segment's direction is its chord.
/// Throws DomainError if a sample leaves the domain.
PathLengthProfile path_length(const KernelModel& model, const std::vector<cplx>& samples,
                              const std::vector<double>& params);
PathLengthProfile path_length(const HartogsKernel& hk, const std::vector<std::array<cplx, 2>>& samples,
                              const std::vector<double>& params);

constexpr int kMaxDyadicIndex = 12;

/// p + 2^-k u, k = 1..k_max; p is a puncture, u a unit vector.
std::vector<cplx> puncture_sequence(const PlanarDomain& d, std::size_t puncture, cplx u, int k_max);
/// z0 - 2^-k n, k = 1..k_max, with n the outward normal at the boundary point z0.
std::vector<cplx> circle_sequence(const PlanarDomain& d, cplx z0, int k_max);

struct DecadeProfile {
    std::vector<int> k;
    /// Length of the segment between distances 2^-k and 2^-(k+1) from the target.
    std::vector<double> increment;
    EndpointRegime regime = EndpointRegime::interior;
};

/// Path target + r u, r from 2^-k_lo down to 2^-(k_hi+1), `samples` points per dyadic step.
DecadeProfile decade_increments(const KernelModel& model, cplx target, cplx u, int k_lo, int k_hi, int samples = 16);
/// Same in the z-plane of a Hartogs domain, with the fiber coordinate held at w.
DecadeProfile decade_increments(const HartogsKernel& hk, cplx target, cplx u, cplx w, int k_lo, int k_hi,
                                int samples = 16);

struct KobayashiRow {
    int k = 0;
    cplx y;
    double ratio = 0.0;
};

struct KobayashiReport {
    std::vector<KobayashiRow> rows;
    /// Nonincreasing ratios, last <= first / 10 and first > 0.
    bool pass = false;
};

/// |f(y_k)|^2 / K(y_k, y_k) with f given by coefficients over the model's raw basis.
KobayashiReport kobayashi_ratio(const KernelModel& model, const Eigen::VectorXcd& coeffs,
                                const std::vector<cplx>& points, int k0 = 1);

struct BoundaryMassRow {
    double t = 0.0;
    double nu = 0.0;
    double boundary_mass_bound = 0.0;
    bool flagged = false;  // collar not resolved at the quadrature depth
};

struct BoundaryMassProfile {
    std::vector<cplx> E;
    std::vector<BoundaryMassRow> rows;
    double r_hat = 0.0;
    double fit_residual = 0.0;  // rms of the log-log fit
    std::size_t fitted_rows = 0;
};

/// nu_E(t) = sup over E of the mass of |K(., w)|^2 e^-phi in the collar {0 < delta < t},
/// as the model norm minus the integral over the inner parallel set {delta > t}.
BoundaryMassProfile boundary_mass(const KernelModel& model, const std::vector<cplx>& E, const std::vector<double>& t,
                                  int max_depth = -1);

}  // namespace bergman
