#include <doctest.h>

#include <chrono>
#include <cmath>

#include "bergman/criteria.hpp"
#include "bergman/errors.hpp"

using namespace bergman;

namespace {

std::vector<std::pair<double, double>> tabulate(const EtaProfile& e, int k_lo, int k_hi) {
    std::vector<std::pair<double, double>> s;
    for (int k = k_lo; k <= k_hi; ++k) s.push_back({std::exp2(-k), e(std::exp2(-k))});
    return s;
}

}  // namespace

TEST_CASE("decay classifier on closed-form profiles") {
    auto pl = classify_condition_1_1(EtaProfile::power_law(1.0, 2.0));
    CHECK(pl.verdict == Verdict::divergent);
    // Integral of du / u from log 2 to log(1/eps).
    for (const auto& p : pl.partial_integrals)
        CHECK(p.value == doctest::Approx(std::log(std::log(1.0 / p.eps) / std::log(2.0))).epsilon(1e-10));

    auto se = classify_condition_1_1(EtaProfile::stretched_exponential(1.0, 1.0, 0.25, std::exp2(-14)));
    CHECK(se.verdict == Verdict::convergent);
    for (std::size_t i = 1; i < se.partial_integrals.size(); ++i)
        CHECK(se.partial_integrals[i].value >= se.partial_integrals[i - 1].value);
    CHECK(se.tail_slope < 0.1 * se.head_slope);

    // eta(t) >= t near t = 0.1 for this profile: the offending t is named.
    try {
        classify_condition_1_1(EtaProfile::stretched_exponential(1.0, 1.0, 0.25, 0.5));
        FAIL("expected a precondition violation");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("at t =") != std::string::npos);
    }
    CHECK_THROWS_AS(classify_condition_1_1(EtaProfile::power_law(4.0, 2.0)), PreconditionError);
    CHECK_THROWS_AS(classify_condition_1_1(EtaProfile::power_law(1.0, 0.5)), PreconditionError);
}

TEST_CASE("decay classifier on tabulated profiles") {
    auto sq = EtaProfile::power_law(1.0, 2.0);
    auto tab = EtaProfile::tabulated(tabulate(sq, 1, 60), 0.5);
    auto c = classify_condition_1_1(tab);
    CHECK(c.verdict == Verdict::divergent);
    auto sym = classify_condition_1_1(sq);
    REQUIRE(c.partial_integrals.size() == sym.partial_integrals.size());
    for (std::size_t i = 0; i < c.partial_integrals.size(); ++i)
        CHECK(c.partial_integrals[i].value == doctest::Approx(sym.partial_integrals[i].value).epsilon(1e-12));
    CHECK(c.tail_slope == doctest::Approx(1.0).epsilon(1e-9));

    auto st = EtaProfile::stretched_exponential(1.0, 1.0, 0.25, std::exp2(-14));
    auto ts = classify_condition_1_1(EtaProfile::tabulated(tabulate(st, 13, 37), std::exp2(-14)));
    CHECK(ts.verdict == Verdict::convergent);

    std::vector<std::pair<double, double>> bad{{0.1, 0.01}, {0.2, 0.25}, {0.4, 0.3}};
    CHECK_THROWS_AS(classify_condition_1_1(EtaProfile::tabulated(bad, 0.4)), PreconditionError);
}

TEST_CASE("beta alpha gate is strict") {
    CHECK(beta_alpha_gate(1.0, 0.3));
    CHECK_FALSE(beta_alpha_gate(0.5, 0.25));
    CHECK_FALSE(beta_alpha_gate(2.0 / 3.0, 1.0 / 3.0));
    CHECK(beta_alpha_gate(0.5, 0.2499));
}

TEST_CASE("Levi form of the tube function near a puncture") {
    std::vector<std::pair<cplx, cplx>> samples;
    for (cplx x : {cplx(0.05, 0.02), cplx(-0.03, 0.04), cplx(0.01, -0.06)})
        samples.push_back({x, cplx(0.2 * std::abs(x), -0.1 * std::abs(x))});
    const auto pd = PlanarDomain::punctured_disc();
    auto r1 = levi_check_tube({pd, 1.0}, samples);
    CHECK(std::abs(r1.global_min) <= 1e-8);
    CHECK(r1.pass);
    CHECK(r1.skipped == 0);
    auto r09 = levi_check_tube({pd, 0.9}, samples);
    CHECK(std::abs(r09.global_min + 0.05) <= 1e-6);
    CHECK_FALSE(r09.pass);
    auto r2 = levi_check_tube({pd, 2.0}, samples);
    CHECK(std::abs(r2.global_min - 0.5) <= 1e-6);

    // |x| = 0.5 is equidistant from the puncture and the outer circle.
    auto ridge = levi_check_tube({pd, 1.0}, {{cplx(0.5, 0.0), cplx(0.01, 0.0)}});
    CHECK(ridge.skipped == 1);
    CHECK(ridge.rows[0].skipped);

    CHECK_THROWS_AS(levi_check_tube({pd, 1.0}, {{cplx(0.05), cplx(0.2)}}), DomainError);
    CHECK_THROWS_AS(levi_check_tube({pd, 1.0}, samples, 1e-2), PreconditionError);
}

TEST_CASE("hyperconvex index falsifier") {
    const auto d = PlanarDomain::unit_disc();
    std::vector<cplx> bp{1.0, cplx(0.0, 1.0), std::polar(1.0, 2.0)};
    auto delta = [&](cplx z) { return d.delta(z); };

    auto a = hyperconvex_index_falsifier(d, [&](cplx z) { return -delta(z); }, 2.0, bp);
    CHECK(a.verdict == HyperconvexVerdict::upper_bound_fails);
    CHECK(a.upper_growth == doctest::Approx(16.0 * std::log10(2.0)).epsilon(1e-9));

    auto b = hyperconvex_index_falsifier(d, [](cplx z) { return -(1.0 - std::norm(z)) / 2.0; }, 1.0, bp);
    CHECK(b.verdict == HyperconvexVerdict::consistent);
    CHECK(b.c_fit > 0.5);

    auto c = hyperconvex_index_falsifier(d, [&](cplx z) { return -std::pow(delta(z), 1.5); }, 1.5, bp);
    CHECK(c.verdict == HyperconvexVerdict::hopf_bound_fails);
    CHECK(c.c_fit == doctest::Approx(std::exp2(-10)).epsilon(1e-9));

    CHECK_THROWS_AS(hyperconvex_index_falsifier(d, [](cplx) { return -1.0; }, 2.0, {0.5}), DomainError);
}

TEST_CASE("appendix verifier") {
    auto t0 = std::chrono::steady_clock::now();
    auto rows = appendix_verifier();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 1.0);
    REQUIRE(rows.size() == 7);
    for (const auto& r : rows) {
        CHECK(r.pass_planar);
        CHECK(r.pass_tube);
        CHECK(r.closed_forms_agree);
        CHECK(r.Lambda <= r.t);
        CHECK(r.tube_Lambda <= r.Lambda);
        CHECK(r.tube_samples > 0);
    }
    const auto& j21 = rows[3];
    CHECK(j21.j == 21);
    CHECK(j21.lambda == std::exp2(-128));
    CHECK(j21.lower_bound == std::exp2(-128));
    const auto& j18 = rows[0];
    CHECK(j18.Lambda == std::exp2(-18) - std::exp2(-54) + std::exp2(-64));

    CHECK_THROWS_AS(appendix_verifier(17, 20), PreconditionError);
    CHECK_THROWS_AS(appendix_verifier(20, 25), ScaleUnderflow);
    CHECK_THROWS_AS(appendix_verifier(20, 19), PreconditionError);
}
