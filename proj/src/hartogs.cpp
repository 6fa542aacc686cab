#include "bergman/hartogs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd pairwise_sum(std::vector<Eigen::MatrixXcd>& parts, std::size_t b, std::size_t e) {
    if (e - b == 1) return parts[b];
    std::size_t m = b + (e - b) / 2;
    return pairwise_sum(parts, b, m) + pairwise_sum(parts, m, e);
}

void require_member(const HartogsDomain& h, cplx z, cplx w) {
    if (!h.contains(z, w))
        throw DomainError("point (" + std::to_string(z.real()) + "+" + std::to_string(z.imag()) + "i, " +
                          std::to_string(w.real()) + "+" + std::to_string(w.imag()) + "i) is not in the Hartogs domain");
}

// Ratio bound for consecutive diagonal majorants: (j+1)/pi grows by (j+2)/(j+1) and the weighted
// kernels by at most ((j+2)/(j+1))^2 delta^{-2 alpha}.
double growth(int j) {
    double g = static_cast<double>(j + 2) / (j + 1);
    return g * g * g;
}

double tail_estimate(double last_majorant, double rho, int j) {
    double r = rho * growth(j);
    if (last_majorant == 0.0) return 0.0;
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    return last_majorant * r / (1.0 - r);
}

int index_cap(const HartogsKernel& hk, int max_index) {
    int cap = std::min(hk.J(), kMaxSeriesIndex);
    if (max_index >= 0) cap = std::min(cap, max_index);
    return cap;
}

}  // namespace

FiberBasisRule standard_fiber_basis(const PlanarDomain& base, int N, int M) {
    return [base, N, M](int, const Weight& weight) { return BasisSpec::standard(base, weight, N, M); };
}

HartogsKernel build_hartogs_kernel(const HartogsDomain& h, int J, const FiberBasisRule& rule, int max_depth) {
    if (J < 0) throw PreconditionError("truncation index J must be nonnegative");
    if (J > kMaxSeriesIndex) throw PreconditionError("truncation index J exceeds " + std::to_string(kMaxSeriesIndex));
    if (!(h.alpha > 0.0)) throw PreconditionError("Hartogs exponent alpha must be positive");
    const auto n = static_cast<std::size_t>(J + 1);
    std::vector<Weight> weights;
    std::vector<BasisSpec> bases;
    for (int j = 0; j <= J; ++j) {
        weights.push_back(Weight::fiber_scaled(h.alpha, j));
        bases.push_back(rule(j, weights.back()));
        bases.back().validate(h.base, weights.back());
    }
    // One rule for every fiber, refined around all complement poles in use.
    BasisSpec focus = bases[0];
    for (std::size_t j = 1; j < n; ++j)
        focus.complement.insert(focus.complement.end(), bases[j].complement.begin(), bases[j].complement.end());
    auto shared = kernel_rule(h.base, weights[0], focus, max_depth);

    std::vector<std::optional<KernelModel>> built(n);
    parallel_for(n, [&](std::size_t j) { built[j] = build_kernel(h.base, weights[j], bases[j], shared); });
    HartogsKernel hk;
    hk.domain_ = h;
    for (auto& m : built) hk.fibers_.push_back(std::move(*m));
    return hk;
}

HartogsValue hartogs_kernel_eval(const HartogsKernel& hk, cplx z, cplx w, cplx t, cplx s, int max_index) {
    const HartogsDomain& h = hk.domain();
    require_member(h, z, w);
    require_member(h, t, s);
    const cplx x = w * std::conj(s);
    const double rho = std::abs(x) / (h.fiber_radius(z) * h.fiber_radius(t));
    const int cap = index_cap(hk, x == cplx(0.0) ? 0 : max_index);

    HartogsValue out;
    cplx sum = 0.0;
    cplx xj = 1.0;
    double ax = 1.0;
    for (int j = 0; j <= cap; ++j) {
        const KernelModel& f = hk.fiber(j);
        Eigen::VectorXcd yz = f.coordinates(z);
        Eigen::VectorXcd yt = (t == z) ? yz : f.coordinates(t);
        const double c = (j + 1) / kPi;
        sum += c * yz.dot(yt) * xj;
        out.terms = j + 1;
        // Cauchy-Schwarz majorant of this term; later terms shrink geometrically from it.
        double majorant = c * std::sqrt(yz.squaredNorm() * yt.squaredNorm()) * ax;
        out.tail_bound = (x == cplx(0.0)) ? 0.0 : tail_estimate(majorant, rho, j);
        if (out.tail_bound <= kSeriesTarget * std::abs(sum)) break;
        xj *= x;
        ax *= std::abs(x);
    }
    out.value = sum;
    out.tail_flag = out.tail_bound > 1e-6 * std::abs(sum);
    return out;
}

HartogsJet hartogs_jet(const HartogsKernel& hk, cplx z, cplx w) {
    const HartogsDomain& h = hk.domain();
    require_member(h, z, w);
    // Derivative series carry an extra factor j^2; sum a few terms past the value's stopping index.
    HartogsValue v = hartogs_kernel_eval(hk, z, w, z, w);
    const int last = w == cplx(0.0) ? std::min(1, hk.J()) : std::min(index_cap(hk, -1), v.terms + 3);
    const double a2 = std::norm(w);
    HartogsJet jet;
    jet.dK[0] = jet.dK[1] = 0.0;
    jet.ddK[0][0] = jet.ddK[0][1] = jet.ddK[1][0] = jet.ddK[1][1] = 0.0;
    Eigen::VectorXcd y, dy;
    double pj = 1.0;     // |w|^{2j}
    double pjm1 = 0.0;   // |w|^{2(j-1)}
    for (int j = 0; j <= last; ++j) {
        hk.fiber(j).coordinates(z, y, dy);
        const double c = (j + 1) / kPi;
        const double k = y.squaredNorm();
        const cplx kz = dy.dot(y);
        const double kzz = dy.squaredNorm();
        jet.K += c * k * pj;
        jet.dK[0] += c * kz * pj;
        jet.ddK[0][0] += c * kzz * pj;
        if (j >= 1) {
            jet.dK[1] += c * k * j * pjm1 * std::conj(w);
            jet.ddK[0][1] += c * kz * static_cast<double>(j) * pjm1 * w;
            jet.ddK[1][1] += c * k * static_cast<double>(j) * j * pjm1;
        }
        pjm1 = pj;
        pj *= a2;
    }
    jet.ddK[1][0] = std::conj(jet.ddK[0][1]);
    jet.terms = last + 1;
    jet.tail_bound = v.tail_bound;
    return jet;
}

// ---- direct 2D oracle ----

Eigen::VectorXcd Kernel2DModel::coordinates(cplx z, cplx w) const {
    const int nz = N_ + 1;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(nz) * (J_ + 1));
    cplx wj = 1.0;
    for (int j = 0; j <= J_; ++j, wj *= w) {
        cplx zn = 1.0;
        for (int n = 0; n <= N_; ++n, zn *= z) v(j * nz + n) = zn * wj;
    }
    v = v.cwiseQuotient(scales_.cast<cplx>()).conjugate();
    factor_.triangularView<Eigen::Lower>().solveInPlace(v);
    return v;
}

double Kernel2DModel::diagonal(cplx z, cplx w) const { return coordinates(z, w).squaredNorm(); }

cplx Kernel2DModel::eval(cplx z, cplx w, cplx t, cplx s) const { return coordinates(z, w).dot(coordinates(t, s)); }

cplx Kernel2DModel::gram_entry(int n, int j, int m, int i) const {
    if (n < 0 || n > N_ || m < 0 || m > N_ || j < 0 || j > J_ || i < 0 || i > J_)
        throw PreconditionError("monomial index out of range");
    const int nz = N_ + 1;
    const int a = j * nz + n, b = i * nz + m;
    return gram_(a, b) * scales_(a) * scales_(b);
}

Kernel2DModel hartogs_direct_oracle(const HartogsDomain& h, int degree_z, int degree_w, int max_depth,
                                    FiberRule fiber, int planar_order) {
    if (degree_z < 0 || degree_w < 0) throw PreconditionError("oracle degrees must be nonnegative");
    if (degree_z > 10 || degree_w > 6 || max_depth > 8)
        throw PreconditionError("oracle limited to N <= 10, J <= 6, depth <= 8");
    if (fiber.radial < 1 || fiber.angular < 1) throw PreconditionError("fiber rule sizes must be positive");
    Kernel2DModel m;
    m.domain_ = h;
    m.N_ = degree_z;
    m.J_ = degree_w;
    const int nz = degree_z + 1;
    const auto dim = static_cast<Eigen::Index>(nz) * (degree_w + 1);

    auto opt = quadrature_options_for(h.base, Weight::neg_log_distance(h.alpha), max_depth);
    opt.order = planar_order;
    const PlanarRule rule = build_planar_rule(CircleRegion::of(h.base), opt);
    std::vector<double> gx, gw;
    gauss_legendre(fiber.radial, gx, gw);
    const double dth = 2.0 * kPi / fiber.angular;
    std::vector<cplx> unit(fiber.angular);
    for (int a = 0; a < fiber.angular; ++a) unit[a] = std::polar(1.0, a * dth);
    const std::size_t per_node = static_cast<std::size_t>(fiber.radial) * fiber.angular;

    constexpr std::size_t kNodes = 64;
    const std::size_t n = rule.size();
    const std::size_t chunks = (n + kNodes - 1) / kNodes;
    if (chunks == 0) throw DomainError("quadrature rule is empty");
    std::vector<Eigen::MatrixXcd> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t b = c * kNodes, e = std::min(n, b + kNodes);
        Eigen::MatrixXcd V(dim, static_cast<Eigen::Index>((e - b) * per_node));
        Eigen::Index col = 0;
        for (std::size_t q = b; q < e; ++q) {
            const cplx z = rule.nodes[q];
            const double R = h.fiber_radius(z);
            for (int k = 0; k < fiber.radial; ++k) {
                const double r = 0.5 * R * (1.0 + gx[k]);
                const double wt = rule.weights[q] * 0.5 * R * gw[k] * r * dth;
                const double sw = std::sqrt(std::max(wt, 0.0));
                for (int a = 0; a < fiber.angular; ++a, ++col) {
                    const cplx w = r * unit[a];
                    cplx wj = sw;
                    for (int j = 0; j <= degree_w; ++j, wj *= w) {
                        cplx zn = 1.0;
                        for (int i = 0; i < nz; ++i, zn *= z) V(j * nz + i, col) = zn * wj;
                    }
                }
            }
        }
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(V);
        parts[c] = acc.selfadjointView<Eigen::Lower>();
    });
    Eigen::MatrixXcd G = pairwise_sum(parts, 0, chunks);
    G = (0.5 * (G + G.adjoint())).eval();
    m.scales_ = G.diagonal().real().cwiseSqrt();
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!(m.scales_(i) > 0.0)) throw IllConditionedBasis("oracle monomial has zero norm", 0.0, 0.0, 0.0);
    const Eigen::VectorXd inv = m.scales_.cwiseInverse();
    m.gram_ = inv.asDiagonal() * G * inv.asDiagonal();

    Eigen::MatrixXcd H = m.gram_.conjugate();
    const double base = 1e-12 * H.trace().real() / static_cast<double>(dim);
    double jitter = 0.0;
    for (int step = 0; step <= 7; ++step) {
        Eigen::MatrixXcd A = H;
        A.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() == Eigen::Success) {
            m.factor_ = llt.matrixL();
            m.jitter_ = jitter;
            return m;
        }
        jitter = step == 0 ? base : jitter * 10.0;
    }
    throw IllConditionedBasis("oracle Gram matrix not positive definite after jitter", 0.0, 0.0, jitter / 10.0);
}

// ---- norm identities ----

cplx HartogsFunction::operator()(cplx z, cplx w) const {
    Eigen::VectorXcd b = basis.values(z);
    cplx sum = 0.0, wj = 1.0;
    for (const auto& c : slices) {
        if (c.size() != b.size()) throw PreconditionError("slice coefficient count does not match the basis");
        sum += c.cwiseProduct(b).sum() * wj;
        wj *= w;
    }
    return sum;
}

NormDecomposition norm_decomposition_check(const HartogsDomain& h, const HartogsFunction& f, int max_depth) {
    NormDecomposition out;
    out.lhs = integrate_hartogs(h, [&](cplx z, cplx w) { return cplx(std::norm(f(z, w))); }, max_depth).value.real();
    for (std::size_t j = 0; j < f.slices.size(); ++j) {
        const Eigen::VectorXcd& c = f.slices[j];
        if (c.size() != static_cast<Eigen::Index>(f.basis.size()))
            throw PreconditionError("slice coefficient count does not match the basis");
        if (c.isZero(0.0)) continue;
        auto fj = [&](cplx z) { return cplx(std::norm(c.cwiseProduct(f.basis.values(z)).sum())); };
        const int jj = static_cast<int>(j);
        double slice = integrate_planar(h.base, fj, Weight::fiber_scaled(h.alpha, jj), max_depth).value.real();
        out.rhs += kPi / (jj + 1) * slice;
    }
    const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
    out.pass = scale == 0.0 || std::abs(out.lhs - out.rhs) <= 1e-3 * scale;
    return out;
}

std::vector<ExhaustionRow> exhaustion_lower_bound_check(const HartogsKernel& hk,
                                                        const std::vector<std::array<cplx, 2>>& probes) {
    std::vector<ExhaustionRow> rows;
    for (const auto& p : probes) {
        ExhaustionRow r;
        r.z = p[0];
        r.w = p[1];
        r.value = hartogs_kernel_eval(hk, r.z, r.w, r.z, r.w).value.real();
        r.lower_bound = hk.fiber(0).diagonal(r.z) / kPi;
        r.pass = r.value >= r.lower_bound - 1e-9;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace bergman
