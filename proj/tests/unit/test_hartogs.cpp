#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "bergman/errors.hpp"
#include "bergman/hartogs.hpp"

using namespace bergman;

namespace {

constexpr double pi = std::numbers::pi;

// ||z^n w^j||^2 on {|z| < 1, |w| < 1 - |z|}: (pi/(j+1)) * 2 pi * B(2n+2, 2(j+1)+1).
double monomial_norm2(int n, int j) { return pi / (j + 1) * 2.0 * pi * std::beta(2.0 * n + 2.0, 2.0 * (j + 1) + 1.0); }

// Diagonal of the kernel built from monomials n <= N, j <= J on that domain.
double truncated_diagonal(int N, int J, cplx z, cplx w) {
    double s = 0.0;
    for (int j = 0; j <= J; ++j)
        for (int n = 0; n <= N; ++n) s += std::pow(std::norm(z), n) * std::pow(std::norm(w), j) / monomial_norm2(n, j);
    return s;
}

HartogsDomain omega1() { return {PlanarDomain::unit_disc(), 1.0}; }

const HartogsKernel& disc_series() {
    static const HartogsKernel hk =
        build_hartogs_kernel(omega1(), 20, standard_fiber_basis(PlanarDomain::unit_disc(), 12, 8), 9);
    return hk;
}

const Kernel2DModel& disc_oracle() {
    static const Kernel2DModel m = hartogs_direct_oracle(omega1(), 8, 5, 7);
    return m;
}

}  // namespace

TEST_CASE("series value at the origin") {
    HartogsValue v = hartogs_kernel_eval(disc_series(), 0.0, 0.0, 0.0, 0.0);
    CHECK(std::abs(v.value.real() - 6.0 / (pi * pi)) <= 1e-3);
    CHECK(v.terms == 1);
    CHECK(v.tail_bound == 0.0);
    CHECK_FALSE(v.tail_flag);
}

TEST_CASE("s = 0 keeps only the first term") {
    const auto& hk = disc_series();
    cplx z(0.2, -0.1), w(0.3, 0.2), t(-0.4, 0.1);
    HartogsValue v = hartogs_kernel_eval(hk, z, w, t, 0.0);
    CHECK(v.terms == 1);
    CHECK(std::abs(v.value - hk.fiber(0).eval(z, t) / pi) <= 1e-14 * std::abs(v.value));
}

TEST_CASE("truncation levels agree within the tail bound") {
    auto h = omega1();
    auto hk = build_hartogs_kernel(h, 40, standard_fiber_basis(h.base, 12, 8), 8);
    cplx z = 0.3, w = 0.1;
    HartogsValue v20 = hartogs_kernel_eval(hk, z, w, z, w, 20);
    HartogsValue v40 = hartogs_kernel_eval(hk, z, w, z, w, 40);
    CHECK(std::abs(v20.value - v40.value) <= v20.tail_bound + 1e-14 * std::abs(v40.value));
    CHECK_FALSE(v40.tail_flag);
    // Forced short truncations: the tail bound must cover the omitted part.
    for (int cap = 0; cap < 4; ++cap) {
        HartogsValue vc = hartogs_kernel_eval(hk, z, w, z, w, cap);
        CHECK(vc.value.real() <= v40.value.real() + 1e-14);
        CHECK(v40.value.real() - vc.value.real() <= vc.tail_bound * (1.0 + 1e-9));
    }
}

TEST_CASE("series matches the closed form and is monotone in the truncation") {
    const auto& hk = disc_series();
    const cplx pts[][2] = {{0.0, 0.5}, {0.3, 0.1}, {cplx(-0.2, 0.3), cplx(0.2, -0.3)}, {0.5, cplx(0.0, 0.4)}};
    for (const auto& p : pts) {
        HartogsValue v = hartogs_kernel_eval(hk, p[0], p[1], p[0], p[1]);
        double summed = truncated_diagonal(12, v.terms - 1, p[0], p[1]);
        CHECK(std::abs(v.value.real() - summed) <= 1e-6 * summed);
        double full = truncated_diagonal(12, 200, p[0], p[1]);
        CHECK(full - summed <= v.tail_bound * (1.0 + 1e-9));
        double prev = 0.0;
        for (int cap = 0; cap <= 8; ++cap) {
            double val = hartogs_kernel_eval(hk, p[0], p[1], p[0], p[1], cap).value.real();
            CHECK(val >= prev);
            prev = val;
        }
    }
}

TEST_CASE("series is Hermitian") {
    const auto& hk = disc_series();
    cplx z(0.1, 0.2), w(0.3, -0.1), t(-0.3, 0.05), s(0.1, 0.4);
    cplx a = hartogs_kernel_eval(hk, z, w, t, s).value;
    cplx b = hartogs_kernel_eval(hk, t, s, z, w).value;
    CHECK(std::abs(a - std::conj(b)) <= 1e-13 * std::abs(a));
}

TEST_CASE("series rejects non-members and bad truncations") {
    const auto& hk = disc_series();
    CHECK_THROWS_AS(hartogs_kernel_eval(hk, 0.5, 0.6, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(hartogs_kernel_eval(hk, 0.0, 0.0, 1.2, 0.0), DomainError);
    CHECK_THROWS_AS(build_hartogs_kernel(omega1(), -1, standard_fiber_basis(omega1().base, 4, 1), 6),
                    PreconditionError);
}

TEST_CASE("direct oracle Gram entries") {
    auto start = std::chrono::steady_clock::now();
    const auto& m = disc_oracle();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    MESSAGE("oracle build seconds: " << secs);
    CHECK(std::abs(m.gram_entry(0, 1, 0, 1).real() - pi * pi / 30.0) <= 1e-4);
    CHECK(std::abs(m.diagonal(0.0, 0.0) - 6.0 / (pi * pi)) <= 1e-3);
    for (int j = 0; j <= 5; ++j)
        for (int n = 0; n <= 8; ++n) {
            double exact = monomial_norm2(n, j);
            CHECK(std::abs(m.gram_entry(n, j, n, j).real() - exact) <= 1e-6 * exact);
            for (int i = 0; i <= 5; ++i)
                if (i != j) CHECK(std::abs(m.gram_entry(n, j, n, i)) <= 1e-12);
        }
}

TEST_CASE("series agrees with the direct oracle") {
    const auto& hk = disc_series();
    const auto& m = disc_oracle();
    const cplx pts[][2] = {{0.0, 0.0}, {0.1, 0.05}, {cplx(0.0, 0.2), 0.1}, {-0.15, cplx(0.0, 0.1)},
                           {cplx(0.1, -0.1), cplx(0.05, 0.05)}, {0.25, 0.0}};
    for (const auto& p : pts) {
        double series = hartogs_kernel_eval(hk, p[0], p[1], p[0], p[1]).value.real();
        double oracle = m.diagonal(p[0], p[1]);
        double allowance = (truncated_diagonal(12, 60, p[0], p[1]) - truncated_diagonal(8, 5, p[0], p[1])) /
                           truncated_diagonal(8, 5, p[0], p[1]);
        CHECK(std::abs(series - oracle) / oracle <= 1e-3 + allowance);
    }
}

TEST_CASE("norm decomposition") {
    auto h = omega1();
    BasisSpec basis;
    basis.polynomial_degree = 2;
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(3), one = zero, z = zero;
    one(0) = 1.0;
    z(1) = 1.0;

    NormDecomposition c1 = norm_decomposition_check(h, {basis, {one}}, 9);
    CHECK(c1.pass);
    CHECK(std::abs(c1.lhs - pi * pi / 6.0) <= 1e-4);
    CHECK(std::abs(c1.rhs - pi * pi / 6.0) <= 1e-4);

    NormDecomposition cw = norm_decomposition_check(h, {basis, {zero, one}}, 9);
    CHECK(cw.pass);
    CHECK(std::abs(cw.lhs - pi * pi / 30.0) <= 1e-4);
    CHECK(std::abs(cw.rhs - pi * pi / 30.0) <= 1e-4);

    NormDecomposition czw = norm_decomposition_check(h, {basis, {zero, z}}, 9);
    CHECK(czw.pass);
    CHECK(std::abs(czw.lhs - monomial_norm2(1, 1)) <= 1e-4 * monomial_norm2(1, 1));

    NormDecomposition c0 = norm_decomposition_check(h, {basis, {zero}}, 7);
    CHECK(c0.pass);
    CHECK(c0.lhs == 0.0);
    CHECK(c0.rhs == 0.0);
}

TEST_CASE("exhaustion lower bound and monotone probes") {
    const auto& hk = disc_series();
    std::vector<std::array<cplx, 2>> probes;
    for (double x : {0.0, 0.5, 0.75, 0.875, 0.9375}) probes.push_back({cplx(x), cplx(0.0)});
    auto rows = exhaustion_lower_bound_check(hk, probes);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].pass);
        if (i > 0) CHECK(rows[i].value > rows[i - 1].value);
    }
    std::vector<std::array<cplx, 2>> fiber_probes;
    for (double r : {0.0, 0.1, 0.2, 0.3, 0.39}) fiber_probes.push_back({cplx(0.6), cplx(0.0, r)});
    auto frows = exhaustion_lower_bound_check(hk, fiber_probes);
    for (std::size_t i = 0; i < frows.size(); ++i) {
        CHECK(frows[i].pass);
        if (i > 0) CHECK(frows[i].value >= frows[i - 1].value);
    }
}
