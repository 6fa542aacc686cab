// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bergman/criteria.hpp"
#include "bergman/errors.hpp"
#include "bergman/experiment.hpp"
#include "bergman/geometry.hpp"
#include "bergman/hartogs.hpp"
#include "bergman/kernel.hpp"
#include "bergman/metric.hpp"

using namespace bergman;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [failed]");
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Raw Gram entry: the model stores the Gram of the basis divided by its quadrature norms.
cplx raw_gram(const KernelModel& m, Eigen::Index a, Eigen::Index b) {
    return m.gram()(a, b) * m.scales()(a) * m.scales()(b);
}

Outcome closed_form_disc() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto d = PlanarDomain::unit_disc();
    auto m = build_kernel(d, Weight::zero(), BasisSpec::standard(d, Weight::zero(), 12, 8), 11);
    double e0 = std::abs(m.diagonal(0.0) - 1.0 / pi);
    double e3 = std::abs(m.diagonal(0.3) - 1.0 / (pi * 0.91 * 0.91));
    double secs = seconds_since(t0);
    o.require(e0 <= 1e-5, "|K(0,0) - 1/pi| = " + fmt(e0));
    o.require(e3 <= 1e-5, "|K(0.3,0.3) - 1/(pi 0.91^2)| = " + fmt(e3));
    o.require(secs < 30.0, "runtime " + fmt(secs) + " s");
    return o;
}

Outcome weighted_disc() {
    Outcome o;
    auto d = PlanarDomain::unit_disc();
    auto w1 = Weight::neg_log_distance(1.0);
    auto m = build_kernel(d, w1, BasisSpec::standard(d, w1, 12, 8), 11);
    double e0 = std::abs(m.diagonal(0.0) - 3.0 / pi);
    o.require(e0 <= 1e-4, "|K(0,0) - 3/pi| = " + fmt(e0));
    // Moments of delta^a on the disc: integral |z|^2n (1-|z|)^a = 2 pi B(2n+2, a+1).
    auto gram_gap = [](const KernelModel& km, double a) {
        double worst = 0.0;
        for (Eigen::Index r = 0; r < km.gram().rows(); ++r)
            for (Eigen::Index c = 0; c < km.gram().cols(); ++c) {
                double exact = r == c ? 2.0 * pi * std::beta(2.0 * r + 2.0, a + 1.0) : 0.0;
                worst = std::max(worst, std::abs(raw_gram(km, r, c) - exact));
            }
        return worst;
    };
    double g1 = gram_gap(m, 1.0);
    o.require(g1 <= 1e-5, "alpha=1 Gram vs 2pi B(2n+2,2) max gap " + fmt(g1));
    auto w2 = Weight::fiber_scaled(1.0, 0);
    auto m2 = build_kernel(d, w2, BasisSpec::standard(d, w2, 12, 8), 11);
    double g2 = gram_gap(m2, 2.0);
    o.require(g2 <= 1e-5, "delta^2 Gram vs 2pi B(2n+2,3) max gap " + fmt(g2));
    return o;
}

Outcome ligocka_consistency() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    HartogsDomain h{PlanarDomain::unit_disc(), 1.0};
    // Matched truncation: z-degree 8 and fibers j <= 5 on both sides.
    auto series = build_hartogs_kernel(h, 5, standard_fiber_basis(h.base, 8, 0), 8);
    auto oracle = hartogs_direct_oracle(h, 8, 5, 7);
    const cplx pts[][2] = {{0.0, 0.0}, {0.1, 0.05}, {cplx(0.0, 0.2), 0.1}, {-0.15, cplx(0.0, 0.1)},
                           {cplx(0.1, -0.1), cplx(0.05, 0.05)}, {0.25, 0.0}};
    double worst = 0.0;
    for (const auto& p : pts) {
        double s = hartogs_kernel_eval(series, p[0], p[1], p[0], p[1], 5).value.real();
        double q = oracle.diagonal(p[0], p[1]);
        worst = std::max(worst, std::abs(s - q) / q);
    }
    o.require(worst <= 1e-3, "6 points, max relative gap " + fmt(worst));
    auto full = build_hartogs_kernel(h, 20, standard_fiber_basis(h.base, 10, 4), 8);
    double k0 = hartogs_kernel_eval(full, 0.0, 0.0, 0.0, 0.0).value.real();
    o.require(std::abs(k0 - 6.0 / (pi * pi)) <= 1e-3, "|K(0,0) - 6/pi^2| = " + fmt(std::abs(k0 - 6.0 / (pi * pi))));
    double secs = seconds_since(t0);
    o.require(secs < 300.0, "runtime " + fmt(secs) + " s");
    return o;
}

Outcome norm_decomposition() {
    Outcome o;
    HartogsDomain h{PlanarDomain::unit_disc(), 1.0};
    BasisSpec basis;
    basis.polynomial_degree = 2;
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(3), one = zero, z = zero;
    one(0) = 1.0;
    z(1) = 1.0;
    struct Case {
        const char* name;
        HartogsFunction f;
    };
    const Case cases[] = {{"1", {basis, {one}}}, {"w", {basis, {zero, one}}}, {"zw", {basis, {zero, z}}}};
    for (const auto& c : cases) {
        auto r = norm_decomposition_check(h, c.f, 9);
        double gap = std::abs(r.lhs - r.rhs) / std::max(r.lhs, r.rhs);
        o.require(gap <= 1e-3, std::string("f=") + c.name + " gap " + fmt(gap));
        if (std::string(c.name) == "w")
            o.require(std::abs(r.lhs - pi * pi / 30.0) <= 1e-4, "||w||^2 - pi^2/30 = " + fmt(r.lhs - pi * pi / 30.0));
    }
    return o;
}

ExperimentReport scenario(nlohmann::json j) { return run(ExperimentConfig::from_json(j)); }

void absorb(Outcome& o, const ExperimentReport& r, const std::string& prefix = "") {
    if (!r.error.empty()) o.require(false, prefix + "error: " + r.error);
    for (const auto& c : r.checks) o.require(c.pass, prefix + c.name + (c.detail.empty() ? "" : " (" + c.detail + ")"));
}

Outcome kernel_convergence() {
    Outcome o;
    absorb(o, scenario({{"scenario", "converge"},
                        {"domain", {{"preset", "scaled_zalcman"}, {"holes", 3}, {"ratio", 0.2}}},
                        {"N", 12},
                        {"M", 8},
                        {"depth", 9},
                        {"schedule", {0.08, 0.04, 0.02, 0.01, 0.005}},
                        {"probes", {{0, 0}, {-0.5, 0.2}, {0.5, 0.3}}}}));
    return o;
}

Outcome boundary_mass_decay() {
    Outcome o;
    absorb(o, scenario({{"scenario", "nu-decay"},
                        {"domain", "unit_disc"},
                        {"depth", 9},
                        {"probes", {{0, 0}}},
                        {"schedule", {0.2, 0.1, 0.05, 0.025, 0.0125}}}));
    return o;
}

Outcome kobayashi() {
    Outcome o;
    absorb(o, scenario({{"scenario", "kobayashi"},
                        {"domain", "unit_disc"},
                        {"depth", 11},
                        {"probes", {{1, 0}}},
                        {"k_lo", 1},
                        {"k_hi", 10},
                        {"enrich_lo", 1},
                        {"enrich_hi", 10},
                        {"enrich_order", 2}}));
    return o;
}

Outcome dichotomy() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    // Matched truncations: same N, M, J, depth and approach-pole rule for both targets.
    nlohmann::json common = {{"scenario", "metric-path"}, {"alpha", 1.0}, {"N", 12},       {"M", 8},
                             {"J", 2},                    {"depth", 10},  {"k_lo", 3},     {"k_hi", 6},
                             {"samples", 16},             {"w", {0, 0}},  {"enrich_lo", 3}, {"enrich_hi", 8},
                             {"enrich_order", 4}};
    auto iso = common;
    iso["domain"] = "punctured_disc";
    iso["probes"] = {{0, 0}};
    iso["direction"] = {1, 0};
    auto r1 = scenario(iso);
    absorb(o, r1, "puncture: ");
    o.require(r1.results.value("regime", "") == "isolated", "puncture regime " + r1.results.value("regime", "?"));
    auto non = common;
    non["domain"] = {{"preset", "scaled_zalcman"}, {"holes", 3}, {"ratio", 0.2}};
    non["probes"] = {{-1, 0}};
    non["direction"] = {1, 0};
    auto r2 = scenario(non);
    absorb(o, r2, "Zalcman: ");
    o.require(r2.results.value("regime", "") == "non_isolated", "Zalcman regime " + r2.results.value("regime", "?"));
    double secs = seconds_since(t0);
    o.require(secs < 600.0, "runtime " + fmt(secs) + " s");
    return o;
}

Outcome levi() {
    Outcome o;
    std::vector<std::pair<cplx, cplx>> samples;
    for (cplx x : {cplx(0.05, 0.02), cplx(-0.03, 0.04), cplx(0.01, -0.06), cplx(0.08, 0.0)})
        samples.push_back({x, cplx(0.2 * std::abs(x), -0.1 * std::abs(x))});
    const auto pd = PlanarDomain::punctured_disc();
    for (double k : {1.0, 0.9, 2.0}) {
        auto r = levi_check_tube({pd, k}, samples);
        double expected = 0.5 * (k - 1.0);
        o.require(r.skipped == 0 && std::abs(r.global_min - expected) <= 1e-6,
                  "k=" + fmt(k) + " min " + fmt(r.global_min) + " vs " + fmt(expected));
    }
    return o;
}

Outcome appendix() {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    auto rows = appendix_verifier(18, 24, {1.0, 4.0});
    double secs = seconds_since(t0);
    bool all = rows.size() == 7;
    for (const auto& r : rows) all = all && r.pass_planar && r.pass_tube && r.closed_forms_agree;
    o.require(all, "j=18..24 planar, tube (k=1,4) and enumerated sup/inf");
    o.require(secs < 1.0, "runtime " + fmt(secs) + " s");
    return o;
}

Outcome classifier() {
    Outcome o;
    auto a = classify_condition_1_1(EtaProfile::power_law(1.0, 2.0));
    o.require(a.verdict == Verdict::divergent, std::string("power law ") + to_string(a.verdict));
    auto b = classify_condition_1_1(EtaProfile::stretched_exponential(1.0, 1.0, 0.25, std::exp2(-14)));
    o.require(b.verdict == Verdict::convergent, std::string("stretched exponential ") + to_string(b.verdict));
    std::vector<std::pair<double, double>> sq;
    for (int k = 1; k <= 60; ++k) sq.push_back({std::exp2(-k), std::exp2(-2 * k)});
    auto c = classify_condition_1_1(EtaProfile::tabulated(sq, 0.5));
    o.require(c.verdict == Verdict::divergent && c.tail_slope > 0.0,
              std::string("tabulated t^2 ") + to_string(c.verdict) + ", tail slope " + fmt(c.tail_slope));
    o.require(beta_alpha_gate(1.0, 0.3) && !beta_alpha_gate(0.5, 0.25) && !beta_alpha_gate(2.0 / 3.0, 1.0 / 3.0),
              "gate strict at beta = alpha/2");
    return o;
}

Outcome geometry_suite() {
    Outcome o;
    std::mt19937_64 g(12);
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53; };
    double excess = -1.0;
    for (const auto& d : {scaled_zalcman(3, 0.2), PlanarDomain::punctured_disc()})
        for (int i = 0; i < 5000; ++i) {
            cplx a(u(-1.5, 1.5), u(-1.5, 1.5)), b(u(-1.5, 1.5), u(-1.5, 1.5));
            excess = std::max(excess, std::abs(d.delta(a) - d.delta(b)) - std::abs(a - b));
        }
    o.require(excess <= 1e-12, "1-Lipschitz on 10^4 pairs, worst excess " + fmt(excess));
    const auto pd = PlanarDomain::punctured_disc();
    for (double r : {1e-2, 1e-3}) {
        auto rep = dk_bound_check(pd, 1.0, r, 4096);
        o.require(rep.pass && rep.max_ratio <= 3.0 + 1e-9, "dk ratio r=" + fmt(r) + " " + fmt(rep.max_ratio));
    }
    auto base = scaled_zalcman(3, 0.2);
    auto fam = uniform_neighborhood_family(base, {0.06, 0.03});
    auto rule = [](const PlanarDomain& d) { return BasisSpec::standard(d, Weight::zero(), 12, 8); };
    cplx x2 = base.holes()[1].center;
    auto rows = density_profile([&](cplx z) { return 1.0 / (z - x2); }, fam, 1.0, rule, 9);
    o.require(rows.size() == 2 && rows[0].error >= 1e-6 && rows[1].error < 1e-6 && rows[1].error < rows[0].error,
              "density error " + fmt(rows[0].error) + " -> " + fmt(rows[1].error) + " when the pole is admitted");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"closed-form kernel, unweighted disc", closed_form_disc},
        {"weighted disc alpha=1", weighted_disc},
        {"fiber series vs direct 2D oracle", ligocka_consistency},
        {"norm decomposition", norm_decomposition},
        {"kernel convergence on the scaled Zalcman family", kernel_convergence},
        {"boundary mass decay", boundary_mass_decay},
        {"Kobayashi ratio", kobayashi},
        {"completeness dichotomy", dichotomy},
        {"Levi checks", levi},
        {"appendix verifier", appendix},
        {"decay classifier and gate", classifier},
        {"geometry suite", geometry_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
