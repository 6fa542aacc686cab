#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "bergman/geometry.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/weight.hpp"

namespace bergman {

/// (z - pole)^{-m}, m = 1..max_order.
struct LaurentGroup {
    cplx pole;
    int max_order = 1;
};

/// Single term (z - pole)^{-order} with the pole strictly outside closure(D).
struct ComplementPole {
    cplx pole;
    int order = 2;
};

/// Ordered basis: 1, z, ..., z^N, then Laurent groups (ascending order within a group),
/// then complement poles.
struct BasisSpec {
    int polynomial_degree = 12;
    std::vector<LaurentGroup> laurent;
    std::vector<ComplementPole> complement;

    std::size_t size() const;
    /// values[i] = b_i(z); derivs (optional) receives b_i'(z).
    void evaluate(cplx z, cplx* values, cplx* derivs = nullptr) const;
    Eigen::VectorXcd values(cplx z) const;
    std::string describe() const;
    nlohmann::json to_json() const;
    bool operator==(const BasisSpec&) const;

    /// Throws DomainError unless every pole is admissible for (domain, weight).
    void validate(const PlanarDomain& domain, const Weight& weight) const;

    /// Polynomials of degree N, order-M Laurent groups at hole centers and puncture groups
    /// capped at the largest square-integrable order.
    static BasisSpec standard(const PlanarDomain& domain, const Weight& weight, int N, int M);
};

/// Largest m with |z - p|^{-2m} delta^beta integrable at an isolated point p (2m < 2 + beta).
int max_puncture_order(const Weight& weight);

/// Poles approaching the boundary point z0 from outside the closure at dyadic distances
/// 2^-i, i = i_lo..i_hi (inversions of interior points across the circle through z0).
/// Empty when z0 is a puncture: no complement points accumulate there.
std::vector<ComplementPole> approach_poles(const PlanarDomain& domain, cplx z0, int i_lo, int i_hi, int order);

class KernelModel {
public:
    const PlanarDomain& domain() const { return domain_; }
    const Weight& weight() const { return weight_; }
    const BasisSpec& basis() const { return basis_; }
    std::size_t dim() const { return scales_.size(); }

    /// G_mn = <b_m, b_n> = integral of b_m conj(b_n) e^{-phi}, basis pre-normalized.
    const Eigen::MatrixXcd& gram() const { return gram_; }
    /// Quadrature norms used for pre-normalization.
    const Eigen::VectorXd& scales() const { return scales_; }
    double jitter_used() const { return jitter_; }
    double condition_estimate() const { return condition_; }
    int max_depth() const { return rule_->max_depth; }
    const PlanarRule& rule() const { return *rule_; }
    std::shared_ptr<const PlanarRule> shared_rule() const { return rule_; }

    /// y(z) = L^{-1} conj(v(z)) with v the normalized basis; K(z,w) = y(z)^H y(w).
    Eigen::VectorXcd coordinates(cplx z) const;
    void coordinates(cplx z, Eigen::VectorXcd& y, Eigen::VectorXcd& dy) const;

    cplx eval(cplx z, cplx w) const;
    /// Coefficients c over the raw basis with K(., w) = sum_i c_i b_i.
    Eigen::VectorXcd column(cplx w) const;
    double diagonal(cplx z) const;
    /// Density e^{-phi} at z.
    double density(cplx z) const { return weight_.density(domain_.delta(z)); }

    nlohmann::json summary(const std::vector<cplx>& probes) const;

private:
    friend KernelModel build_kernel(const PlanarDomain&, const Weight&, const BasisSpec&,
                                    std::shared_ptr<const PlanarRule>);
    PlanarDomain domain_;
    Weight weight_;
    BasisSpec basis_;
    std::shared_ptr<const PlanarRule> rule_;
    Eigen::VectorXd scales_;
    Eigen::MatrixXcd gram_;
    Eigen::MatrixXcd factor_;  // lower triangular, L L^H = conj(G) + jitter
    double jitter_ = 0.0;
    double condition_ = 0.0;
};

std::shared_ptr<const PlanarRule> kernel_rule(const PlanarDomain& domain, const Weight& weight,
                                              const BasisSpec& basis, int max_depth);

KernelModel build_kernel(const PlanarDomain& domain, const Weight& weight, const BasisSpec& basis, int max_depth);
KernelModel build_kernel(const PlanarDomain& domain, const Weight& weight, const BasisSpec& basis,
                         std::shared_ptr<const PlanarRule> rule);

/// Throws DomainError when z or w is not in the open domain.
cplx kernel_eval(const KernelModel& model, cplx z, cplx w);

/// |integral f conj(K(., w)) e^{-phi} - f(w)| over the model's own rule; coefficients refer to the raw basis.
double reproducing_check(const KernelModel& model, const Eigen::VectorXcd& coeffs, cplx w);

/// Weighted L2 norm of sum_i coeffs_i b_i over the model's rule.
double basis_function_norm(const KernelModel& model, const Eigen::VectorXcd& coeffs);

using BasisRule = std::function<BasisSpec(const PlanarDomain&)>;

struct ConvergenceRow {
    double t = 0.0;
    cplx probe;
    double member_value = 0.0;
    double base_value = 0.0;
    bool ok = true;
    std::string error;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    /// Per probe: nondecreasing as t decreases and every value <= base + tolerance.
    bool monotone = true;
    bool bounded = true;
};

/// Members use the weight delta_member^alpha (alpha = 0 means unweighted).
ConvergenceTable diagonal_convergence_table(const NeighborhoodFamily& family, double weight_alpha,
                                            const BasisRule& basis_rule, const std::vector<cplx>& probes,
                                            int max_depth, double tolerance = 1e-6);

struct DifferenceNorm {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// lhs = integral over the base of |K_t(., w) - K_base(., w)|^2 e^{-phi_base}; rhs = K_base(w,w) - K_t(w,w).
DifferenceNorm difference_norm_check(const KernelModel& base_model, const KernelModel& t_model, cplx w);

struct DensityRow {
    double t = 0.0;
    std::size_t admitted_poles = 0;
    double error = 0.0;
    double relative_error = 0.0;
};

/// Best approximation error of f in L2(base, phi) from the span of basis_rule(member(t)).
std::vector<DensityRow> density_profile(const std::function<cplx(cplx)>& f, const NeighborhoodFamily& family,
                                        double weight_alpha, const BasisRule& basis_rule, int max_depth);

/// Least-squares residual of f against the span of `basis`, in L2 over `rule` with density rho.
double projection_residual(const std::function<cplx(cplx)>& f, const BasisSpec& basis, const PlanarRule& rule,
                           const std::function<double(cplx)>& density, double* f_norm = nullptr);

}  // namespace bergman
