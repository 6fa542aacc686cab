#include "bergman/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/parallel.hpp"

namespace bergman {

namespace {

constexpr std::size_t kChunk = 4096;

std::string point_str(cplx z) {
    std::ostringstream os;
    os.precision(6);
    os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
    return os.str();
}

nlohmann::json point_json(cplx z) { return {z.real(), z.imag()}; }

template <class M>
M pairwise_matrix_sum(std::vector<M>& parts, std::size_t b, std::size_t e) {
    if (e - b == 1) return parts[b];
    std::size_t h = b + (e - b) / 2;
    return pairwise_matrix_sum(parts, b, h) + pairwise_matrix_sum(parts, h, e);
}

}  // namespace

std::size_t BasisSpec::size() const {
    std::size_t n = static_cast<std::size_t>(polynomial_degree + 1);
    for (const auto& g : laurent) n += static_cast<std::size_t>(g.max_order);
    return n + complement.size();
}

void BasisSpec::evaluate(cplx z, cplx* v, cplx* d) const {
    std::size_t i = 0;
    cplx p = 1.0;
    for (int n = 0; n <= polynomial_degree; ++n, ++i) {
        if (d) d[i] = n == 0 ? cplx(0.0) : static_cast<double>(n) * (n == 1 ? cplx(1.0) : v[i - 1]);
        v[i] = p;
        p *= z;
    }
    for (const auto& g : laurent) {
        cplx u = 1.0 / (z - g.pole);
        cplx q = u;
        for (int m = 1; m <= g.max_order; ++m, ++i) {
            v[i] = q;
            q *= u;
            if (d) d[i] = -static_cast<double>(m) * q;
        }
    }
    for (const auto& c : complement) {
        cplx u = 1.0 / (z - c.pole);
        cplx q = 1.0;
        for (int m = 0; m < c.order; ++m) q *= u;
        v[i] = q;
        if (d) d[i] = -static_cast<double>(c.order) * q * u;
        ++i;
    }
}

Eigen::VectorXcd BasisSpec::values(cplx z) const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(size()));
    evaluate(z, v.data());
    return v;
}

std::string BasisSpec::describe() const {
    std::ostringstream os;
    os << "polynomials(degree=" << polynomial_degree << ")";
    for (const auto& g : laurent) os << " + laurent" << point_str(g.pole) << "^-1..-" << g.max_order;
    if (!complement.empty()) {
        os << " + " << complement.size() << " complement poles";
        os << " [order " << complement.front().order << ", nearest distance ";
        os.precision(3);
        double far = 0.0, near = std::numeric_limits<double>::infinity();
        for (const auto& c : complement) {
            far = std::max(far, std::abs(c.pole));
            near = std::min(near, std::abs(c.pole));
        }
        os << near << ".." << far << " from 0]";
    }
    return os.str();
}

nlohmann::json BasisSpec::to_json() const {
    nlohmann::json j;
    j["polynomial_degree"] = polynomial_degree;
    j["laurent"] = nlohmann::json::array();
    for (const auto& g : laurent) j["laurent"].push_back({{"pole", point_json(g.pole)}, {"max_order", g.max_order}});
    j["complement"] = nlohmann::json::array();
    for (const auto& c : complement) j["complement"].push_back({{"pole", point_json(c.pole)}, {"order", c.order}});
    j["size"] = size();
    return j;
}

bool BasisSpec::operator==(const BasisSpec& o) const {
    if (polynomial_degree != o.polynomial_degree || laurent.size() != o.laurent.size() ||
        complement.size() != o.complement.size())
        return false;
    for (std::size_t i = 0; i < laurent.size(); ++i)
        if (laurent[i].pole != o.laurent[i].pole || laurent[i].max_order != o.laurent[i].max_order) return false;
    for (std::size_t i = 0; i < complement.size(); ++i)
        if (complement[i].pole != o.complement[i].pole || complement[i].order != o.complement[i].order) return false;
    return true;
}

int max_puncture_order(const Weight& weight) {
    double beta = weight.exponent();
    int m = static_cast<int>(std::ceil((2.0 + beta) / 2.0)) - 1;
    return std::max(0, m);
}

void BasisSpec::validate(const PlanarDomain& domain, const Weight& weight) const {
    if (polynomial_degree < 0) throw DomainError("polynomial degree must be nonnegative");
    for (const auto& g : laurent) {
        if (g.max_order < 1) throw DomainError("Laurent order must be at least 1");
        bool in_hole = std::any_of(domain.holes().begin(), domain.holes().end(),
                                   [&](const Disc& h) { return std::abs(g.pole - h.center) <= h.radius; });
        bool at_puncture = std::find(domain.punctures().begin(), domain.punctures().end(), g.pole) !=
                           domain.punctures().end();
        if (!in_hole && !at_puncture)
            throw DomainError("Laurent pole " + point_str(g.pole) + " is not in a hole or at a puncture");
        if (at_puncture && g.max_order > max_puncture_order(weight))
            throw DomainError("Laurent order " + std::to_string(g.max_order) + " at puncture " + point_str(g.pole) +
                              " is not square-integrable for weight " + weight.describe());
    }
    for (const auto& c : complement) {
        if (c.order < 1) throw DomainError("complement pole order must be at least 1");
        if (!(domain.delta(c.pole) < 0.0))
            throw DomainError("complement pole " + point_str(c.pole) + " is not outside the closure");
    }
}

BasisSpec BasisSpec::standard(const PlanarDomain& domain, const Weight& weight, int N, int M) {
    BasisSpec b;
    b.polynomial_degree = N;
    for (const Disc& h : domain.holes()) b.laurent.push_back({h.center, M});
    int cap = std::min(M, max_puncture_order(weight));
    if (cap > 0)
        for (cplx p : domain.punctures()) b.laurent.push_back({p, cap});
    return b;
}

std::vector<ComplementPole> approach_poles(const PlanarDomain& domain, cplx z0, int i_lo, int i_hi, int order) {
    auto sd = domain.signed_distance(z0);
    if (std::abs(sd.value) > 1e-12) throw DomainError("approach target is not a boundary point");
    std::vector<ComplementPole> poles;
    if (sd.nearest.kind == ComponentKind::puncture) return poles;
    for (int i = i_lo; i <= i_hi; ++i) {
        double e = std::ldexp(1.0, -i);
        if (sd.nearest.kind == ComponentKind::outer) {
            cplx c = domain.outer().center;
            double R = domain.outer().radius;
            cplx a = c + (z0 - c) * (1.0 - e);
            poles.push_back({c + R * R / std::conj(a - c), order});
        } else {
            const Disc& h = domain.holes()[sd.nearest.index];
            cplx a = h.center + (z0 - h.center) * (1.0 + e);
            poles.push_back({h.center + h.radius * h.radius / std::conj(a - h.center), order});
        }
    }
    return poles;
}

std::shared_ptr<const PlanarRule> kernel_rule(const PlanarDomain& domain, const Weight& weight,
                                              const BasisSpec& basis, int max_depth) {
    QuadratureOptions opt = quadrature_options_for(domain, weight, max_depth);
    for (const auto& c : basis.complement) opt.focus_points.push_back(c.pole);
    return std::make_shared<const PlanarRule>(build_planar_rule(CircleRegion::of(domain), opt));
}

KernelModel build_kernel(const PlanarDomain& domain, const Weight& weight, const BasisSpec& basis, int max_depth) {
    basis.validate(domain, weight);
    return build_kernel(domain, weight, basis, kernel_rule(domain, weight, basis, max_depth));
}

KernelModel build_kernel(const PlanarDomain& domain, const Weight& weight, const BasisSpec& basis,
                         std::shared_ptr<const PlanarRule> rule) {
    basis.validate(domain, weight);
    KernelModel m;
    m.domain_ = domain;
    m.weight_ = weight;
    m.basis_ = basis;
    m.rule_ = std::move(rule);
    const PlanarRule& r = *m.rule_;
    const auto dim = static_cast<Eigen::Index>(basis.size());
    const std::size_t n = r.size();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    if (chunks == 0) throw DomainError("quadrature rule is empty");

    std::vector<double> sqrt_w(n);
    for (std::size_t q = 0; q < n; ++q) sqrt_w[q] = std::sqrt(r.weights[q] * m.density(r.nodes[q]));

    // Pass 1: quadrature norms of the raw basis functions.
    std::vector<Eigen::VectorXd> norms(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t b = c * kChunk, e = std::min(n, b + kChunk);
        Eigen::VectorXcd v(dim);
        Eigen::MatrixXd sq(static_cast<Eigen::Index>(e - b), dim);
        for (std::size_t q = b; q < e; ++q) {
            basis.evaluate(r.nodes[q], v.data());
            sq.row(static_cast<Eigen::Index>(q - b)) = (v * sqrt_w[q]).cwiseAbs2().transpose();
        }
        norms[c].resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) norms[c](i) = pairwise_sum(sq.col(i).data(), e - b);
    });
    Eigen::VectorXd norm2 = pairwise_matrix_sum(norms, 0, chunks);
    m.scales_ = norm2.cwiseSqrt();
    for (Eigen::Index i = 0; i < dim; ++i)
        if (!(m.scales_(i) > 0.0) || !std::isfinite(m.scales_(i)))
            throw IllConditionedBasis("basis function " + std::to_string(i) + " has zero or non-finite norm", 0.0,
                                      0.0, 0.0);
    Eigen::VectorXd inv = m.scales_.cwiseInverse();

    // Pass 2: H = V^H V with rows sqrt(w rho) v(z)/s, accumulated per chunk.
    std::vector<Eigen::MatrixXcd> parts(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t b = c * kChunk, e = std::min(n, b + kChunk);
        Eigen::MatrixXcd V(dim, static_cast<Eigen::Index>(e - b));
        for (std::size_t q = b; q < e; ++q) {
            auto col = V.col(static_cast<Eigen::Index>(q - b));
            basis.evaluate(r.nodes[q], col.data());
            col = col.cwiseProduct(inv.cast<cplx>()) * sqrt_w[q];
        }
        // Columns hold v; V V^H summed over nodes gives sum v conj(v)^T, i.e. G itself.
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
        acc.selfadjointView<Eigen::Lower>().rankUpdate(V);
        parts[c] = acc.selfadjointView<Eigen::Lower>();
    });
    m.gram_ = pairwise_matrix_sum(parts, 0, chunks);
    // Exact Hermitian symmetry.
    m.gram_ = (0.5 * (m.gram_ + m.gram_.adjoint())).eval();

    Eigen::MatrixXcd H = m.gram_.conjugate();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
    m.condition_ = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();

    auto try_factor = [&](double jitter) -> bool {
        Eigen::MatrixXcd A = H;
        if (jitter > 0.0) A.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() != Eigen::Success) return false;
        Eigen::MatrixXcd L = llt.matrixL();
        for (Eigen::Index i = 0; i < dim; ++i)
            if (!(L(i, i).real() > 0.0) || !std::isfinite(L(i, i).real())) return false;
        m.factor_ = std::move(L);
        m.jitter_ = jitter;
        return true;
    };
    if (!try_factor(0.0)) {
        double base = 1e-12 * H.trace().real() / static_cast<double>(dim);
        bool ok = false;
        double jitter = base;
        for (int step = 0; step <= 6 && !ok; ++step, jitter *= 10.0) ok = try_factor(jitter);
        if (!ok)
            throw IllConditionedBasis("ill-conditioned basis: Gram matrix not positive definite after jitter " +
                                          std::to_string(jitter / 10.0) + " (eigenvalues " + std::to_string(lmin) +
                                          " .. " + std::to_string(lmax) + ")",
                                      lmin, lmax, jitter / 10.0);
    }
    return m;
}

Eigen::VectorXcd KernelModel::coordinates(cplx z) const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(dim()));
    basis_.evaluate(z, v.data());
    v = v.cwiseQuotient(scales_.cast<cplx>()).conjugate();
    factor_.triangularView<Eigen::Lower>().solveInPlace(v);
    return v;
}

void KernelModel::coordinates(cplx z, Eigen::VectorXcd& y, Eigen::VectorXcd& dy) const {
    const auto d = static_cast<Eigen::Index>(dim());
    y.resize(d);
    dy.resize(d);
    basis_.evaluate(z, y.data(), dy.data());
    y = y.cwiseQuotient(scales_.cast<cplx>()).conjugate();
    dy = dy.cwiseQuotient(scales_.cast<cplx>()).conjugate();
    factor_.triangularView<Eigen::Lower>().solveInPlace(y);
    factor_.triangularView<Eigen::Lower>().solveInPlace(dy);
}

cplx KernelModel::eval(cplx z, cplx w) const { return coordinates(z).dot(coordinates(w)); }

Eigen::VectorXcd KernelModel::column(cplx w) const {
    Eigen::VectorXcd a = coordinates(w);
    factor_.adjoint().triangularView<Eigen::Upper>().solveInPlace(a);
    return a.cwiseQuotient(scales_.cast<cplx>());
}

double KernelModel::diagonal(cplx z) const { return coordinates(z).squaredNorm(); }

nlohmann::json KernelModel::summary(const std::vector<cplx>& probes) const {
    nlohmann::json j;
    j["domain"] = domain_.to_json();
    j["weight"] = weight_.describe();
    j["basis"] = basis_.describe();
    j["basis_size"] = dim();
    j["max_depth"] = max_depth();
    j["quadrature_nodes"] = rule_->size();
    j["jitter_used"] = jitter_;
    j["condition_estimate"] = condition_;
    j["diagonal"] = nlohmann::json::array();
    for (cplx p : probes) j["diagonal"].push_back({{"z", point_json(p)}, {"K", diagonal(p)}});
    return j;
}

cplx kernel_eval(const KernelModel& model, cplx z, cplx w) {
    if (!model.domain().contains(z)) throw DomainError("kernel_eval: z " + point_str(z) + " is not in the domain");
    if (!model.domain().contains(w)) throw DomainError("kernel_eval: w " + point_str(w) + " is not in the domain");
    return model.eval(z, w);
}

namespace {

// sum_q w_q rho_q g(z_q), chunked and reduced in fixed order.
template <class T, class G>
T node_sum(const PlanarRule& r, const G& g) {
    const std::size_t n = r.size();
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<T> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::size_t b = c * kChunk, e = std::min(n, b + kChunk);
        std::vector<T> t(e - b);
        for (std::size_t q = b; q < e; ++q) t[q - b] = g(q) * r.weights[q];
        partial[c] = pairwise_sum(t.data(), t.size());
    });
    return pairwise_sum(partial.data(), partial.size());
}

cplx combine(const BasisSpec& b, const Eigen::VectorXcd& c, cplx z) {
    Eigen::VectorXcd v(c.size());
    b.evaluate(z, v.data());
    return v.transpose() * c;
}

}  // namespace

double reproducing_check(const KernelModel& model, const Eigen::VectorXcd& coeffs, cplx w) {
    if (static_cast<std::size_t>(coeffs.size()) != model.dim()) throw PreconditionError("coefficient length mismatch");
    if (!model.domain().contains(w)) throw DomainError("reproducing_check: w is not in the domain");
    const PlanarRule& r = model.rule();
    Eigen::VectorXcd a = model.column(w);
    cplx integral = node_sum<cplx>(r, [&](std::size_t q) {
        cplx z = r.nodes[q];
        Eigen::VectorXcd v = model.basis().values(z);
        cplx f = v.transpose() * coeffs;
        cplx k = v.transpose() * a;
        return f * std::conj(k) * model.density(z);
    });
    return std::abs(integral - combine(model.basis(), coeffs, w));
}

double basis_function_norm(const KernelModel& model, const Eigen::VectorXcd& coeffs) {
    const PlanarRule& r = model.rule();
    double n2 = node_sum<double>(r, [&](std::size_t q) {
        return std::norm(combine(model.basis(), coeffs, r.nodes[q])) * model.density(r.nodes[q]);
    });
    return std::sqrt(n2);
}

namespace {

Weight member_weight(double alpha) { return alpha > 0.0 ? Weight::neg_log_distance(alpha) : Weight::zero(); }

}  // namespace

ConvergenceTable diagonal_convergence_table(const NeighborhoodFamily& family, double weight_alpha,
                                            const BasisRule& basis_rule, const std::vector<cplx>& probes,
                                            int max_depth, double tolerance) {
    for (cplx p : probes)
        if (!family.base.contains(p)) throw DomainError("probe is not interior to the base domain");
    Weight wt = member_weight(weight_alpha);
    KernelModel base = build_kernel(family.base, wt, basis_rule(family.base), max_depth);
    std::vector<double> base_values;
    for (cplx p : probes) base_values.push_back(base.diagonal(p));

    ConvergenceTable table;
    std::vector<double> previous(probes.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < family.size(); ++i) {
        std::vector<ConvergenceRow> rows;
        try {
            KernelModel m = build_kernel(family.members[i], wt, basis_rule(family.members[i]), max_depth);
            for (std::size_t k = 0; k < probes.size(); ++k)
                rows.push_back({family.schedule[i], probes[k], m.diagonal(probes[k]), base_values[k], true, ""});
        } catch (const std::exception& e) {
            rows.clear();
            for (std::size_t k = 0; k < probes.size(); ++k)
                rows.push_back({family.schedule[i], probes[k], std::numeric_limits<double>::quiet_NaN(),
                                base_values[k], false, e.what()});
        }
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (!rows[k].ok) continue;
            if (rows[k].member_value < previous[k]) table.monotone = false;
            if (rows[k].member_value > base_values[k] + tolerance) table.bounded = false;
            previous[k] = rows[k].member_value;
        }
        table.rows.insert(table.rows.end(), rows.begin(), rows.end());
    }
    return table;
}

DifferenceNorm difference_norm_check(const KernelModel& base_model, const KernelModel& t_model, cplx w) {
    if (!base_model.domain().contains(w) || !t_model.domain().contains(w))
        throw DomainError("difference_norm_check: w is not in both domains");
    const PlanarRule& r = base_model.rule();
    Eigen::VectorXcd ab = base_model.column(w), at = t_model.column(w);
    double lhs = node_sum<double>(r, [&](std::size_t q) {
        cplx z = r.nodes[q];
        cplx d = combine(t_model.basis(), at, z) - combine(base_model.basis(), ab, z);
        return std::norm(d) * base_model.density(z);
    });
    DifferenceNorm out;
    out.lhs = lhs;
    out.rhs = base_model.diagonal(w) - t_model.diagonal(w);
    out.pass = out.lhs <= out.rhs + 1e-6 * (1.0 + out.rhs);
    return out;
}

double projection_residual(const std::function<cplx(cplx)>& f, const BasisSpec& basis, const PlanarRule& rule,
                           const std::function<double(cplx)>& density, double* f_norm) {
    // Streaming Householder QR of the weighted sample matrix [V | F]; the last diagonal
    // entry of R is the least-squares residual.
    const auto d = static_cast<Eigen::Index>(basis.size());
    const std::size_t n = rule.size();
    constexpr std::size_t block = 2048;
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(0, d + 1);
    Eigen::VectorXcd v(d);
    double fn2 = 0.0;
    for (std::size_t b = 0; b < n; b += block) {
        std::size_t e = std::min(n, b + block);
        Eigen::MatrixXcd S(R.rows() + static_cast<Eigen::Index>(e - b), d + 1);
        S.topRows(R.rows()) = R;
        for (std::size_t q = b; q < e; ++q) {
            cplx z = rule.nodes[q];
            double s = std::sqrt(rule.weights[q] * density(z));
            basis.evaluate(z, v.data());
            auto row = S.row(R.rows() + static_cast<Eigen::Index>(q - b));
            row.head(d) = v.transpose() * s;
            row(d) = f(z) * s;
            fn2 += std::norm(row(d));
        }
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(S);
        Eigen::Index k = std::min<Eigen::Index>(S.rows(), d + 1);
        R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    }
    if (f_norm) *f_norm = std::sqrt(fn2);
    return R.rows() > d ? std::abs(R(d, d)) : 0.0;
}

std::vector<DensityRow> density_profile(const std::function<cplx(cplx)>& f, const NeighborhoodFamily& family,
                                        double weight_alpha, const BasisRule& basis_rule, int max_depth) {
    Weight wt = member_weight(weight_alpha);
    const PlanarDomain& base = family.base;
    auto rule = kernel_rule(base, wt, BasisSpec{}, max_depth);
    auto density = [&](cplx z) { return wt.density(base.delta(z)); };
    std::vector<DensityRow> rows;
    for (std::size_t i = 0; i < family.size(); ++i) {
        BasisSpec b = basis_rule(family.members[i]);
        b.validate(family.members[i], wt);
        double fn = 0.0;
        double err = projection_residual(f, b, *rule, density, &fn);
        rows.push_back({family.schedule[i], b.laurent.size(), err, fn > 0.0 ? err / fn : 0.0});
    }
    return rows;
}

}  // namespace bergman
