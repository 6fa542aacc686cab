#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bergman/errors.hpp"
#include "bergman/metric.hpp"

using namespace bergman;

namespace {

constexpr double pi = std::numbers::pi;

double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

const KernelModel& disc_model() {
    static const KernelModel m = [] {
        auto d = PlanarDomain::unit_disc();
        return build_kernel(d, Weight::zero(), BasisSpec::standard(d, Weight::zero(), 12, 8), 9);
    }();
    return m;
}

const KernelModel& zalcman_model() {
    static const KernelModel m = [] {
        auto d = scaled_zalcman(3, 0.2);
        auto w = Weight::neg_log_distance(1.0);
        return build_kernel(d, w, BasisSpec::standard(d, w, 10, 4), 9);
    }();
    return m;
}

const HartogsKernel& disc_hartogs() {
    static const HartogsKernel hk = [] {
        HartogsDomain h{PlanarDomain::unit_disc(), 1.0};
        return build_hartogs_kernel(h, 20, standard_fiber_basis(h.base, 10, 4), 8);
    }();
    return hk;
}

}  // namespace

TEST_CASE("disc metric closed form") {
    const auto& m = disc_model();
    CHECK(std::abs(metric_at(m, 0.0, 1.0).value - std::sqrt(2.0)) <= 1e-6);
    CHECK(std::abs(metric_at(m, 0.5, 1.0).value - std::sqrt(2.0) / 0.75) <= 1e-4);
    CHECK(metric_at(m, cplx(0.2, 0.1), 0.0).value == 0.0);
    double v = metric_at(m, cplx(0.2, 0.1), cplx(0.3, -0.4)).value;
    CHECK(std::abs(metric_at(m, cplx(0.2, 0.1), cplx(-0.9, 1.2)).value - 3.0 * v) <= 1e-12 * v);
    CHECK_THROWS_AS(metric_at(m, 1.5, 1.0), DomainError);
}

TEST_CASE("metric agrees with finite differences") {
    std::mt19937_64 g(7);
    for (const KernelModel* m : {&disc_model(), &zalcman_model()}) {
        int n = 0;
        while (n < 20) {
            cplx z(uniform(g, -0.95, 0.95), uniform(g, -0.95, 0.95));
            if (m->domain().delta(z) < 0.02) continue;
            cplx xi = std::polar(1.0, uniform(g, 0.0, 2.0 * pi));
            double exact = metric_at(*m, z, xi).value;
            double fd = metric_fd(*m, z, xi);
            CHECK(exact > 0.0);
            CHECK(std::abs(exact - fd) <= 1e-3 * exact);
            ++n;
        }
    }
    const auto& hk = disc_hartogs();
    int n = 0;
    while (n < 20) {
        cplx z(uniform(g, -0.9, 0.9), uniform(g, -0.9, 0.9));
        if (std::abs(z) > 0.9) continue;
        cplx w = std::polar(uniform(g, 0.0, 0.7) * (1.0 - std::abs(z)), uniform(g, 0.0, 2.0 * pi));
        std::array<cplx, 2> xi{std::polar(1.0, uniform(g, 0.0, 6.3)), std::polar(1.0, uniform(g, 0.0, 6.3))};
        double exact = metric_at(hk, {z, w}, xi).value;
        double fd = metric_fd(hk, {z, w}, xi);
        CHECK(exact > 0.0);
        CHECK(std::abs(exact - fd) <= 1e-3 * exact);
        ++n;
    }
}

TEST_CASE("Hartogs metric at w = 0 uses the first fiber only") {
    const auto& hk = disc_hartogs();
    cplx z(0.3, -0.2);
    double a = metric_at(hk, {z, 0.0}, {1.0, 0.0}).value;
    double b = metric_at(hk.fiber(0), z, 1.0).value;
    CHECK(std::abs(a - b) <= 1e-12 * b);
}

TEST_CASE("path length") {
    const auto& m = disc_model();
    std::vector<cplx> still(5, cplx(0.1, 0.2));
    std::vector<double> s{0.0, 0.25, 0.5, 0.75, 1.0};
    auto p0 = path_length(m, still, s);
    for (double L : p0.length) CHECK(L == 0.0);
    CHECK(p0.regime == EndpointRegime::interior);

    std::vector<cplx> radial;
    std::vector<double> params;
    for (int i = 0; i <= 400; ++i) {
        radial.push_back(0.5 * i / 400.0);
        params.push_back(i / 400.0);
    }
    auto p = path_length(m, radial, params);
    for (std::size_t i = 1; i < p.length.size(); ++i) CHECK(p.length[i] >= p.length[i - 1]);
    double exact = std::log(3.0) / std::sqrt(2.0);
    CHECK(std::abs(p.length.back() - exact) <= 1e-3 * exact);

    radial.back() = 1.2;
    CHECK_THROWS_AS(path_length(m, radial, params), DomainError);
}

TEST_CASE("approach sequences and regimes") {
    auto pd = PlanarDomain::punctured_disc();
    auto seq = puncture_sequence(pd, 0, 1.0, 12);
    CHECK(seq.size() == 12);
    CHECK(seq.back() == cplx(std::exp2(-12)));
    CHECK(endpoint_regime(pd, seq.back()) == EndpointRegime::isolated);
    auto z = scaled_zalcman(3, 0.2);
    auto cs = circle_sequence(z, -1.0, 10);
    CHECK(cs[0] == cplx(-0.5));
    CHECK(endpoint_regime(z, cs.back()) == EndpointRegime::non_isolated);
    auto hs = circle_sequence(z, cplx(0.5, 0.1), 6);
    CHECK(z.delta(hs[5]) == doctest::Approx(std::exp2(-6)).epsilon(1e-9));
    CHECK_THROWS_AS(circle_sequence(z, 0.0, 3), PreconditionError);
    CHECK_THROWS_AS(puncture_sequence(pd, 0, 1.0, 13), PreconditionError);
}

TEST_CASE("decade increments near a puncture decay") {
    HartogsDomain h{PlanarDomain::punctured_disc(), 1.0};
    auto hk = build_hartogs_kernel(h, 1, standard_fiber_basis(h.base, 10, 4), 9);
    auto d = decade_increments(hk, 0.0, 1.0, 0.0, 3, 6);
    CHECK(d.regime == EndpointRegime::isolated);
    for (std::size_t i = 1; i < d.increment.size(); ++i) CHECK(d.increment[i - 1] / d.increment[i] >= 1.5);
}

TEST_CASE("Kobayashi ratio") {
    // Order-2 poles at the reflections 1/y_k put K(., y_k) in the span.
    auto d = PlanarDomain::unit_disc();
    BasisSpec b = BasisSpec::standard(d, Weight::zero(), 12, 8);
    b.complement = approach_poles(d, 1.0, 1, 4, 2);
    auto m = build_kernel(d, Weight::zero(), b, 9);
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m.dim())), one = zero;
    one(0) = 1.0;
    std::vector<cplx> ys;
    for (int k = 1; k <= 4; ++k) ys.push_back(1.0 - std::exp2(-k));
    auto r0 = kobayashi_ratio(m, zero, ys);
    for (const auto& r : r0.rows) CHECK(r.ratio == 0.0);
    CHECK_FALSE(r0.pass);
    auto r1 = kobayashi_ratio(m, one, ys);
    for (const auto& r : r1.rows) {
        double y = r.y.real();
        CHECK(std::abs(r.ratio - pi * std::pow(1.0 - y * y, 2)) <= 1e-6);
    }
    CHECK(r1.pass);
    auto rc = kobayashi_ratio(m, one, std::vector<cplx>(4, cplx(0.3)));
    CHECK_FALSE(rc.pass);
}

TEST_CASE("boundary mass on the disc") {
    const auto& m = disc_model();
    std::vector<double> t{0.2, 0.1, 0.05, 0.025};
    auto bm = boundary_mass(m, {0.0}, t);
    for (std::size_t i = 0; i < bm.rows.size(); ++i) {
        double exact = (2.0 * t[i] - t[i] * t[i]) / pi;
        CHECK(std::abs(bm.rows[i].nu - exact) <= 1e-6);
        if (i > 0) CHECK(bm.rows[i].nu < bm.rows[i - 1].nu);
    }
    CHECK(bm.r_hat >= 0.85);
    CHECK(bm.r_hat <= 1.15);
    auto finer = boundary_mass(m, {0.0}, t, 10);
    CHECK(std::abs(finer.r_hat - bm.r_hat) <= 0.05);

    auto full = boundary_mass(m, {0.0}, {2.0});
    CHECK(std::abs(full.rows[0].nu - 1.0 / pi) <= 1e-6);

    auto d = PlanarDomain::unit_disc();
    auto w = Weight::neg_log_distance(1.0);
    auto mw = build_kernel(d, w, BasisSpec::standard(d, w, 12, 8), 9);
    auto bw = boundary_mass(mw, {0.0}, t);
    CHECK(bw.r_hat >= 0.85);
    CHECK_THROWS_AS(boundary_mass(m, {0.0}, {0.1, 0.2}), PreconditionError);
}
