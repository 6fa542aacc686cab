#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/kernel.hpp"

using namespace bergman;

namespace {

constexpr double pi = std::numbers::pi;

double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Unweighted kernel of the disc of radius R centered at 0.
cplx disc_kernel(double R, cplx z, cplx w) {
    cplx q = R * R - z * std::conj(w);
    return R * R / (pi * q * q);
}

const KernelModel& unit_disc_model() {
    static const KernelModel m = [] {
        auto d = PlanarDomain::unit_disc();
        return build_kernel(d, Weight::zero(), BasisSpec::standard(d, Weight::zero(), 12, 8), 11);
    }();
    return m;
}

const KernelModel& zalcman_model() {
    static const KernelModel m = [] {
        auto d = scaled_zalcman(3, 0.2);
        auto w = Weight::neg_log_distance(1.0);
        return build_kernel(d, w, BasisSpec::standard(d, w, 12, 8), 10);
    }();
    return m;
}

}  // namespace

TEST_CASE("unweighted disc kernel matches the closed form") {
    const auto& m = unit_disc_model();
    CHECK(std::abs(m.diagonal(0.0) - 1.0 / pi) <= 1e-6);
    CHECK(std::abs(m.diagonal(0.3) - 1.0 / (pi * 0.91 * 0.91)) <= 1e-5);
    CHECK(std::abs(kernel_eval(m, 0.5, 0.0) - 1.0 / pi) <= 1e-10);
    CHECK(m.jitter_used() == 0.0);
    CHECK_THROWS_AS(kernel_eval(m, 1.2, 0.0), DomainError);
    auto s = m.summary({0.0});
    CHECK(s["diagonal"][0]["K"].get<double>() == doctest::Approx(1.0 / pi));
    CHECK(s["jitter_used"].get<double>() == 0.0);
}

TEST_CASE("weighted disc kernel at the origin") {
    auto d = PlanarDomain::unit_disc();
    auto w = Weight::neg_log_distance(1.0);
    auto m = build_kernel(d, w, BasisSpec::standard(d, w, 12, 8), 10);
    CHECK(std::abs(m.diagonal(0.0) - 3.0 / pi) <= 1e-4);
    // Radial weight: the Gram matrix is diagonal.
    double off = 0.0;
    for (Eigen::Index i = 0; i < m.gram().rows(); ++i)
        for (Eigen::Index k = 0; k < m.gram().cols(); ++k)
            if (i != k) off = std::max(off, std::abs(m.gram()(i, k)));
    CHECK(off <= 1e-8);
}

TEST_CASE("Hermitian symmetry and Cauchy-Schwarz") {
    const auto& m = zalcman_model();
    const auto& G = m.gram();
    CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff());
    std::mt19937_64 g(7);
    int pairs = 0;
    while (pairs < 200) {
        cplx z(uniform(g, -1, 1), uniform(g, -1, 1)), w(uniform(g, -1, 1), uniform(g, -1, 1));
        if (!m.domain().contains(z) || !m.domain().contains(w)) continue;
        ++pairs;
        cplx a = m.eval(z, w), b = m.eval(w, z);
        CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
        CHECK(std::norm(a) <= m.diagonal(z) * m.diagonal(w) * (1 + 1e-12));
        CHECK(m.diagonal(z) >= 0.0);
    }
}

TEST_CASE("enlarging the basis never lowers the diagonal") {
    auto d = scaled_zalcman(2, 0.2);
    auto w = Weight::zero();
    auto small = BasisSpec::standard(d, w, 6, 3);
    auto large = BasisSpec::standard(d, w, 12, 6);
    auto rule = kernel_rule(d, w, large, 9);
    auto a = build_kernel(d, w, small, rule), b = build_kernel(d, w, large, rule);
    for (cplx z : {cplx(0.0), cplx(-0.5, 0.3), cplx(0.5, 0.2), cplx(0.9, 0.0)})
        CHECK(b.diagonal(z) >= a.diagonal(z) - 1e-9);
}

TEST_CASE("domain monotonicity on disc pairs") {
    auto w = Weight::zero();
    for (double R : {1.05, 1.2, 1.5}) {
        PlanarDomain big(Disc{0.0, R});
        auto m = build_kernel(big, w, BasisSpec::standard(big, w, 12, 8), 10);
        for (cplx z : {cplx(0.0), cplx(0.3, 0.1), cplx(-0.6, 0.0)}) {
            CHECK(std::abs(m.diagonal(z) - disc_kernel(R, z, z).real()) <= 1e-5 * disc_kernel(R, z, z).real());
            CHECK(m.diagonal(z) <= unit_disc_model().diagonal(z));
        }
    }
}

TEST_CASE("reproducing property") {
    const auto& m = unit_disc_model();
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m.dim()));
    f(0) = 1.0;
    CHECK(reproducing_check(m, f, 0.0) <= 1e-8);
    f.setZero();
    f(3) = 1.0;
    CHECK(reproducing_check(m, f, 0.4) <= 1e-6 * basis_function_norm(m, f));

    const auto& z = zalcman_model();
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(z.dim()));
    g(13 + 8 + 2) = 1.0;  // (z - x_2)^{-3}
    CHECK(reproducing_check(z, g, cplx(-0.5, 0.0)) <= 1e-5 * basis_function_norm(z, g));
    CHECK(reproducing_check(z, g, cplx(0.2, 0.1)) <= 1e-5 * basis_function_norm(z, g));
}

TEST_CASE("basis validation") {
    auto d = scaled_zalcman(1, 0.2);
    BasisSpec b;
    b.laurent.push_back({cplx(0.0, 0.5), 2});
    CHECK_THROWS_AS(b.validate(d, Weight::zero()), DomainError);
    auto pd = PlanarDomain::punctured_disc();
    BasisSpec p;
    p.laurent.push_back({0.0, 1});
    CHECK_THROWS_AS(p.validate(pd, Weight::zero()), DomainError);
    CHECK_NOTHROW(p.validate(pd, Weight::fiber_scaled(1.0, 0)));
    p.laurent[0].max_order = 2;
    CHECK_THROWS_AS(p.validate(pd, Weight::fiber_scaled(1.0, 0)), DomainError);
    CHECK_NOTHROW(p.validate(pd, Weight::fiber_scaled(1.0, 1)));
    CHECK(max_puncture_order(Weight::zero()) == 0);
    CHECK(max_puncture_order(Weight::fiber_scaled(1.0, 4)) == 5);
    BasisSpec c;
    c.complement.push_back({cplx(0.99, 0.0), 2});
    CHECK_THROWS_AS(c.validate(d, Weight::zero()), DomainError);
    CHECK(BasisSpec::standard(pd, Weight::zero(), 12, 8).laurent.empty());
}

TEST_CASE("approach poles") {
    auto d = scaled_zalcman(3, 0.2);
    auto poles = approach_poles(d, -1.0, 3, 8, 4);
    REQUIRE(poles.size() == 6);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        CHECK(d.delta(poles[i].pole) < 0.0);
        CHECK(std::abs(poles[i].pole + 1.0) == doctest::Approx(1.0 / (1.0 - std::ldexp(1.0, -3 - int(i))) - 1.0));
    }
    auto inner = approach_poles(d, cplx(0.6, 0.0), 3, 4, 2);
    for (const auto& p : inner) CHECK(std::abs(p.pole - 0.5) < 0.1);
    CHECK(approach_poles(PlanarDomain::punctured_disc(), 0.0, 3, 8, 2).empty());
    CHECK_THROWS_AS(approach_poles(d, 0.35, 3, 8, 2), DomainError);
}

TEST_CASE("duplicate basis functions force reported jitter") {
    auto d = PlanarDomain::unit_disc();
    BasisSpec b;
    b.polynomial_degree = 3;
    b.complement.push_back({cplx(1.5, 0.0), 2});
    b.complement.push_back({cplx(1.5, 0.0), 2});
    auto m = build_kernel(d, Weight::zero(), b, 8);
    CHECK(m.jitter_used() > 0.0);
    CHECK(m.condition_estimate() > 1e12);
}

TEST_CASE("diagonal convergence on enlarged discs") {
    auto fam = uniform_neighborhood_family(PlanarDomain::unit_disc(), {0.2, 0.1, 0.05});
    auto rule = [](const PlanarDomain& d) { return BasisSpec::standard(d, Weight::zero(), 12, 8); };
    auto table = diagonal_convergence_table(fam, 0.0, rule, {0.0}, 10);
    REQUIRE(table.rows.size() == 3);
    for (const auto& r : table.rows) {
        CHECK(r.member_value == doctest::Approx(1.0 / (pi * (1 + r.t) * (1 + r.t))).epsilon(1e-8));
        CHECK(r.base_value == doctest::Approx(1.0 / pi).epsilon(1e-10));
    }
    CHECK(table.monotone);
    CHECK(table.bounded);
}

TEST_CASE("difference norm inequality") {
    const auto& m = unit_disc_model();
    auto same = difference_norm_check(m, m, cplx(0.2, 0.1));
    CHECK(same.lhs <= 1e-20);
    CHECK(same.rhs == 0.0);
    CHECK(same.pass);

    double R = 1.2;
    PlanarDomain big(Disc{0.0, R});
    auto mb = build_kernel(big, Weight::zero(), BasisSpec::standard(big, Weight::zero(), 12, 8), 10);
    auto dn = difference_norm_check(m, mb, 0.0);
    double q = 1.0 - 1.0 / (R * R);
    CHECK(dn.lhs == doctest::Approx(q * q / pi).epsilon(1e-8));
    CHECK(dn.rhs == doctest::Approx(q / pi).epsilon(1e-8));
    CHECK(dn.pass);
}

TEST_CASE("density profile admits the matching pole") {
    auto base = scaled_zalcman(3, 0.2);
    auto fam = uniform_neighborhood_family(base, {0.06, 0.03});
    auto rule = [](const PlanarDomain& d) { return BasisSpec::standard(d, Weight::zero(), 12, 8); };
    cplx x2 = base.holes()[1].center;
    auto rows = density_profile([&](cplx z) { return 1.0 / (z - x2); }, fam, 1.0, rule, 9);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].admitted_poles == 1);
    CHECK(rows[1].admitted_poles == 2);
    CHECK(rows[0].error > 1e-3);
    CHECK(rows[1].error < 1e-6);

    auto in_span = density_profile([](cplx z) { return 1.0 + z * z * z; }, fam, 1.0, rule, 8);
    for (const auto& r : in_span) CHECK(r.error <= 1e-8);
}
