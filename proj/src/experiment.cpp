#include "bergman/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/hartogs.hpp"
#include "bergman/kernel.hpp"
#include "bergman/metric.hpp"
#include "bergman/parallel.hpp"

#ifndef BERGMAN_LAB_VERSION
#define BERGMAN_LAB_VERSION "0.0.0"
#endif

namespace bergman {

using nlohmann::json;

namespace {

constexpr double pi = std::numbers::pi;

// ---- scenario table ----

const std::vector<ScenarioInfo>& scenario_table() {
    static const std::vector<ScenarioInfo> table{
        {"kernel", "planar weighted Bergman kernel on probe points",
         "closed-form disc kernel and the reproducing property"},
        {"hartogs", "Hartogs-domain kernel by the fiber series",
         "fiber decomposition of the Hartogs kernel"},
        {"converge", "diagonal values along a shrinking neighbourhood family",
         "monotone kernel convergence and the difference-norm inequality"},
        {"density", "best approximation of a pole function from member bases",
         "density of neighbourhood-holomorphic functions"},
        {"metric-path", "dyadic Bergman length increments toward a boundary point",
         "completeness dichotomy: isolated versus non-isolated boundary points"},
        {"kobayashi", "|f|^2 / K along a sequence tending to the boundary",
         "Kobayashi criterion for exhaustiveness"},
        {"nu-decay", "collar mass of |K(., w)|^2 and its decay exponent",
         "boundary mass estimate and its power decay"},
        {"classify-eta", "divergence test for the boundary decay integral",
         "power-law versus stretched-exponential decay regimes"},
        {"levi", "Levi form of k|y|^2 - delta(x)^2 on a tube",
         "plurisubharmonicity of the tube function iff k >= 1"},
        {"appendix-verify", "multiprecision sandwich for the dyadic Zalcman domain and its tubes",
         "e^(-log 2 / t^(1/3)) <= delta_{D^t} <= t and the tube witness/box steps"},
        {"dk-bound", "distance ratio after adding a small disc at a boundary point",
         "delta_{D_k} <= 3 delta_D and 1-Lipschitz signed distance"},
    };
    return table;
}

// ---- formatting ----

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "true" : "false"; }

json point_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// ---- config parsing ----

[[noreturn]] void bad(const std::string& path, const std::string& msg) { throw ConfigError(path, msg); }

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) bad(path, "must be finite");
    return v;
}

int read_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

cplx read_cplx(const json& j, const std::string& path) {
    if (j.is_number()) return read_number(j, path);
    if (!j.is_array() || j.size() != 2) bad(path, "expected [re, im]");
    return {read_number(j[0], path + "/0"), read_number(j[1], path + "/1")};
}

std::vector<double> read_numbers(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(read_number(j[i], path + "/" + std::to_string(i)));
    return v;
}

void check_range(int v, int lo, int hi, const std::string& path) {
    if (v < lo || v > hi) bad(path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

PlanarDomain read_domain(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "unit_disc") return PlanarDomain::unit_disc();
        if (s == "punctured_disc") return PlanarDomain::punctured_disc();
        if (s == "scaled_zalcman") return scaled_zalcman();
        bad("/domain", "unknown preset '" + s + "'");
    }
    if (j.is_object() && j.contains("preset")) {
        if (!j.at("preset").is_string() || j.at("preset").get<std::string>() != "scaled_zalcman")
            bad("/domain/preset", "only scaled_zalcman takes parameters");
        int holes = 3;
        double ratio = 0.2;
        for (const auto& item : j.items()) {
            if (item.key() == "holes") holes = read_int(item.value(), "/domain/holes");
            else if (item.key() == "ratio") ratio = read_number(item.value(), "/domain/ratio");
            else if (item.key() != "preset") bad("/domain/" + item.key(), "unknown field");
        }
        check_range(holes, 0, 8, "/domain/holes");
        try {
            return scaled_zalcman(holes, ratio);
        } catch (const std::exception& e) {
            bad("/domain/ratio", e.what());
        }
    }
    try {
        return PlanarDomain::from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError("/domain" + e.field, std::string(e.what()).substr(e.field.size() + 2));
    } catch (const std::exception& e) {
        bad("/domain", e.what());
    }
}

json eta_json(const EtaProfile& e) {
    json j;
    switch (e.kind) {
        case EtaProfile::Kind::power_law: j = {{"kind", "power_law"}, {"C", e.C}, {"alpha", e.alpha}}; break;
        case EtaProfile::Kind::stretched_exponential:
            j = {{"kind", "stretched_exponential"}, {"C", e.C}, {"C1", e.C1}, {"beta", e.beta}};
            break;
        case EtaProfile::Kind::tabulated: {
            j = {{"kind", "tabulated"}, {"samples", json::array()}};
            for (const auto& [t, v] : e.samples) j["samples"].push_back({t, v});
            break;
        }
    }
    j["r0"] = e.r0;
    return j;
}

EtaProfile read_eta(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) bad("/eta/kind", "missing");
    const std::string kind = j.at("kind").get<std::string>();
    auto get = [&](const char* key, double def) {
        return j.contains(key) ? read_number(j.at(key), std::string("/eta/") + key) : def;
    };
    for (const auto& item : j.items()) {
        static const char* known[] = {"kind", "C", "alpha", "C1", "beta", "samples", "r0"};
        if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }))
            bad("/eta/" + item.key(), "unknown field");
    }
    double r0 = get("r0", 0.5);
    if (kind == "power_law") return EtaProfile::power_law(get("C", 1.0), get("alpha", 2.0), r0);
    if (kind == "stretched_exponential")
        return EtaProfile::stretched_exponential(get("C", 1.0), get("C1", 1.0), get("beta", 0.25), r0);
    if (kind == "tabulated") {
        if (!j.contains("samples") || !j.at("samples").is_array()) bad("/eta/samples", "expected an array");
        std::vector<std::pair<double, double>> s;
        for (std::size_t i = 0; i < j.at("samples").size(); ++i) {
            cplx p = read_cplx(j.at("samples")[i], "/eta/samples/" + std::to_string(i));
            s.push_back({p.real(), p.imag()});
        }
        return EtaProfile::tabulated(std::move(s), r0);
    }
    bad("/eta/kind", "unknown kind '" + kind + "'");
}

bool strictly_monotone(const std::vector<double>& v) {
    if (v.size() < 2) return true;
    bool dec = true, inc = true;
    for (std::size_t i = 1; i < v.size(); ++i) {
        dec = dec && v[i] < v[i - 1];
        inc = inc && v[i] > v[i - 1];
    }
    return dec || inc;
}

bool is_unit_disc(const PlanarDomain& d, bool allow_punctures) {
    return d.outer().center == cplx(0.0) && d.outer().radius == 1.0 && d.holes().empty() &&
           (allow_punctures || d.punctures().empty());
}

Weight planar_weight(double alpha) { return alpha > 0.0 ? Weight::neg_log_distance(alpha) : Weight::zero(); }

double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// ---- report helpers ----

struct Ctx {
    const ExperimentConfig& cfg;
    ExperimentReport& rep;

    void check(std::string name, bool pass, std::string detail = {}) {
        rep.checks.push_back({std::move(name), pass, std::move(detail)});
    }
    void row(std::vector<std::string> r) { rep.rows.push_back(std::move(r)); }
};

void stamp_model(Ctx& c, const KernelModel& m) {
    c.rep.results["quadrature_depth"] = m.max_depth();
    c.rep.results["jitter"] = m.jitter_used();
    c.rep.results["condition_estimate"] = m.condition_estimate();
    c.rep.results["basis_size"] = m.dim();
}

// ---- scenarios ----

void run_kernel(Ctx& c) {
    const auto& cfg = c.cfg;
    Weight w = planar_weight(cfg.alpha);
    auto model = build_kernel(cfg.domain, w, BasisSpec::standard(cfg.domain, w, cfg.N, cfg.M), cfg.depth);
    stamp_model(c, model);
    std::vector<cplx> probes = cfg.probes.empty() ? std::vector<cplx>{0.0, 0.3} : cfg.probes;
    const bool disc = is_unit_disc(cfg.domain, cfg.alpha == 0.0);
    c.rep.header = {"z_re", "z_im", "K", "closed_form", "abs_error", "reproducing_error", "error"};
    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.dim()));
    one(0) = 1.0;
    bool closed_ok = true, repro_ok = true;
    for (cplx z : probes) {
        try {
            double K = kernel_eval(model, z, z).real();
            double cf = std::nan("");
            if (disc && cfg.alpha == 0.0) cf = 1.0 / (pi * std::pow(1.0 - std::norm(z), 2));
            else if (disc && z == cplx(0.0)) cf = (cfg.alpha + 1.0) * (cfg.alpha + 2.0) / (2.0 * pi);
            double err = std::abs(K - cf);
            if (std::isfinite(cf)) closed_ok = closed_ok && err <= 1e-5;
            double rerr = reproducing_check(model, one, z);
            repro_ok = repro_ok && rerr <= 1e-8;
            if (z == cplx(0.0)) c.rep.results["K00"] = K;
            c.row({num(z.real()), num(z.imag()), num(K), num(cf), num(err), num(rerr), ""});
        } catch (const std::exception& e) {
            closed_ok = repro_ok = false;
            c.row({num(z.real()), num(z.imag()), "", "", "", "", e.what()});
        }
    }
    if (disc) c.check("closed_form_within_1e-5", closed_ok);
    c.check("reproducing_within_1e-8", repro_ok);
}

void run_hartogs(Ctx& c) {
    const auto& cfg = c.cfg;
    HartogsDomain h{cfg.domain, cfg.alpha};
    auto hk = build_hartogs_kernel(h, cfg.J, standard_fiber_basis(cfg.domain, cfg.N, cfg.M), cfg.depth);
    c.rep.results["quadrature_depth"] = cfg.depth;
    double jitter = 0.0;
    for (const auto& f : hk.fibers()) jitter = std::max(jitter, f.jitter_used());
    c.rep.results["jitter"] = jitter;
    auto pts = cfg.points.empty() ? std::vector<std::array<cplx, 2>>{{0.0, 0.0}, {cplx(0.3, 0.1), cplx(0.2, 0.0)}}
                                  : cfg.points;
    c.rep.header = {"z_re", "z_im", "w_re", "w_im", "K", "tail_bound", "terms", "tail_flag", "error"};
    bool flags_ok = true, origin_ok = true, origin_seen = false;
    const bool disc = is_unit_disc(cfg.domain, false) && cfg.alpha == 1.0;
    for (const auto& [z, w] : pts) {
        try {
            auto v = hartogs_kernel_eval(hk, z, w, z, w);
            flags_ok = flags_ok && !v.tail_flag;
            if (disc && z == cplx(0.0) && w == cplx(0.0)) {
                origin_seen = true;
                origin_ok = std::abs(v.value.real() - 6.0 / (pi * pi)) <= 1e-3;
                c.rep.results["K_origin"] = v.value.real();
            }
            c.row({num(z.real()), num(z.imag()), num(w.real()), num(w.imag()), num(v.value.real()), num(v.tail_bound),
                   num(v.terms), flag(v.tail_flag), ""});
        } catch (const std::exception& e) {
            flags_ok = false;
            c.row({num(z.real()), num(z.imag()), num(w.real()), num(w.imag()), "", "", "", "", e.what()});
        }
    }
    c.check("series_tails_resolved", flags_ok);
    if (origin_seen) c.check("origin_value_6_over_pi2_within_1e-3", origin_ok);
}

void run_converge(Ctx& c) {
    const auto& cfg = c.cfg;
    auto sched = cfg.schedule.empty() ? std::vector<double>{0.08, 0.04, 0.02, 0.01, 0.005} : cfg.schedule;
    auto fam = uniform_neighborhood_family(cfg.domain, sched);
    Weight w = planar_weight(cfg.alpha);
    auto rule = [&](const PlanarDomain& d) { return BasisSpec::standard(d, w, cfg.N, cfg.M); };
    auto probes = cfg.probes.empty() ? std::vector<cplx>{0.0, cplx(-0.5, 0.2), cplx(0.5, 0.3)} : cfg.probes;
    c.rep.header = {"kind", "t", "t_inner", "z_re", "z_im", "member_or_lhs", "base_or_rhs", "ok", "error"};

    auto table = diagonal_convergence_table(fam, cfg.alpha, rule, probes, cfg.depth);
    for (const auto& r : table.rows)
        c.row({"diagonal", num(r.t), "", num(r.probe.real()), num(r.probe.imag()), num(r.member_value),
               num(r.base_value), flag(r.ok), r.error});
    c.check("diagonal_nondecreasing", table.monotone);
    c.check("diagonal_bounded_by_base", table.bounded);

    // Adjacent pairs: (base, smallest member), then consecutive members.
    std::vector<KernelModel> models(fam.size() + 1);
    parallel_for(models.size(), [&](std::size_t i) {
        const PlanarDomain& d = i == 0 ? fam.base : fam.members[fam.size() - i];
        models[i] = build_kernel(d, w, rule(d), cfg.depth);
    });
    stamp_model(c, models[0]);
    bool diff_ok = true;
    for (std::size_t i = 0; i + 1 < models.size(); ++i) {
        double t_inner = i == 0 ? 0.0 : fam.schedule[fam.size() - i];
        double t_outer = fam.schedule[fam.size() - 1 - i];
        for (cplx z : probes) {
            try {
                auto dn = difference_norm_check(models[i], models[i + 1], z);
                diff_ok = diff_ok && dn.pass;
                c.row({"difference", num(t_outer), num(t_inner), num(z.real()), num(z.imag()), num(dn.lhs),
                       num(dn.rhs), flag(dn.pass), ""});
            } catch (const std::exception& e) {
                diff_ok = false;
                c.row({"difference", num(t_outer), num(t_inner), num(z.real()), num(z.imag()), "", "", "false",
                       e.what()});
            }
        }
    }
    c.check("difference_norm_inequality", diff_ok);
}

void run_density(Ctx& c) {
    const auto& cfg = c.cfg;
    if (cfg.domain.holes().empty()) throw ConfigError("/domain", "density needs a domain with holes");
    if (cfg.target_hole < 0 || cfg.target_hole >= static_cast<int>(cfg.domain.holes().size()))
        throw ConfigError("/target_hole", "no such hole");
    auto sched = cfg.schedule.empty() ? std::vector<double>{0.06, 0.03} : cfg.schedule;
    auto fam = uniform_neighborhood_family(cfg.domain, sched);
    Weight w = planar_weight(cfg.alpha);
    auto rule = [&](const PlanarDomain& d) { return BasisSpec::standard(d, w, cfg.N, cfg.M); };
    const cplx x = cfg.domain.holes()[static_cast<std::size_t>(cfg.target_hole)].center;
    auto rows = density_profile([&](cplx z) { return 1.0 / (z - x); }, fam, cfg.alpha, rule, cfg.depth);
    c.rep.results["quadrature_depth"] = cfg.depth;
    c.rep.header = {"t", "admitted_poles", "target_admitted", "error", "relative_error"};
    bool ok = true;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& holes = fam.members[i].holes();
        bool admitted = std::any_of(holes.begin(), holes.end(), [&](const Disc& d) { return d.center == x; });
        ok = ok && (admitted ? rows[i].error < 1e-6 : rows[i].error >= 1e-6) && rows[i].error <= prev;
        prev = rows[i].error;
        c.row({num(rows[i].t), num(rows[i].admitted_poles), flag(admitted), num(rows[i].error),
               num(rows[i].relative_error)});
    }
    c.check("error_below_1e-6_iff_pole_admitted", ok);
}

void run_metric_path(Ctx& c) {
    const auto& cfg = c.cfg;
    if (cfg.probes.empty()) throw ConfigError("/probes", "metric-path needs the boundary target as probes[0]");
    const cplx target = cfg.probes[0];
    HartogsDomain h{cfg.domain, cfg.alpha};
    auto base_rule = standard_fiber_basis(cfg.domain, cfg.N, cfg.M);
    std::vector<ComplementPole> poles;
    if (cfg.enrich_hi >= cfg.enrich_lo)
        poles = approach_poles(cfg.domain, target, cfg.enrich_lo, cfg.enrich_hi, cfg.enrich_order);
    FiberBasisRule rule = [&](int j, const Weight& wt) {
        BasisSpec b = base_rule(j, wt);
        b.complement.insert(b.complement.end(), poles.begin(), poles.end());
        return b;
    };
    auto hk = build_hartogs_kernel(h, cfg.J, rule, cfg.depth);
    c.rep.results["quadrature_depth"] = cfg.depth;
    c.rep.results["approach_poles"] = poles.size();
    double jitter = 0.0;
    for (const auto& f : hk.fibers()) jitter = std::max(jitter, f.jitter_used());
    c.rep.results["jitter"] = jitter;

    auto prof = decade_increments(hk, target, cfg.direction, cfg.w, cfg.k_lo, cfg.k_hi, cfg.samples);
    c.rep.results["regime"] = to_string(prof.regime);
    c.rep.header = {"k", "increment", "ratio_to_previous", "regime"};
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, min_ratio = lo;
    for (std::size_t i = 0; i < prof.k.size(); ++i) {
        double r = i == 0 ? std::nan("") : prof.increment[i - 1] / prof.increment[i];
        if (i > 0) min_ratio = std::min(min_ratio, r);
        lo = std::min(lo, prof.increment[i]);
        hi = std::max(hi, prof.increment[i]);
        c.row({num(prof.k[i]), num(prof.increment[i]), num(r), to_string(prof.regime)});
    }
    c.rep.results["band"] = hi / lo;
    c.rep.results["min_decay_ratio"] = min_ratio;
    if (prof.regime == EndpointRegime::isolated)
        c.check("increments_decay_by_1.5_per_step", min_ratio >= 1.5, "min ratio " + num(min_ratio));
    else if (prof.regime == EndpointRegime::non_isolated)
        c.check("increments_within_1.5_band", hi / lo <= 1.5, "band " + num(hi / lo));
}

void run_kobayashi(Ctx& c) {
    const auto& cfg = c.cfg;
    const cplx z0 = cfg.probes.empty() ? cplx(1.0) : cfg.probes[0];
    Weight w = planar_weight(cfg.alpha);
    BasisSpec b = BasisSpec::standard(cfg.domain, w, cfg.N, cfg.M);
    if (cfg.enrich_hi >= cfg.enrich_lo)
        b.complement = approach_poles(cfg.domain, z0, cfg.enrich_lo, cfg.enrich_hi, cfg.enrich_order);
    auto model = build_kernel(cfg.domain, w, b, cfg.depth);
    stamp_model(c, model);
    auto seq = circle_sequence(cfg.domain, z0, cfg.k_hi);
    std::vector<cplx> ys(seq.begin() + (cfg.k_lo - 1), seq.end());
    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.dim()));
    one(0) = 1.0;
    auto rep = kobayashi_ratio(model, one, ys, cfg.k_lo);
    const bool disc = is_unit_disc(cfg.domain, false) && cfg.alpha == 0.0;
    c.rep.header = {"k", "y_re", "y_im", "ratio", "closed_form", "abs_error"};
    double worst = 0.0;
    for (const auto& r : rep.rows) {
        double cf = disc ? pi * std::pow(1.0 - std::norm(r.y), 2) : std::nan("");
        double err = std::abs(r.ratio - cf);
        if (disc) worst = std::max(worst, err);
        c.row({num(r.k), num(r.y.real()), num(r.y.imag()), num(r.ratio), num(cf), num(err)});
    }
    c.check("ratios_decay_monotonically", rep.pass);
    if (disc) c.check("closed_form_within_1e-4", worst <= 1e-4, "max abs error " + num(worst));
}

void run_nu_decay(Ctx& c) {
    const auto& cfg = c.cfg;
    Weight w = planar_weight(cfg.alpha);
    auto model = build_kernel(cfg.domain, w, BasisSpec::standard(cfg.domain, w, cfg.N, cfg.M), cfg.depth);
    stamp_model(c, model);
    auto E = cfg.probes.empty() ? std::vector<cplx>{0.0} : cfg.probes;
    auto t = cfg.schedule.empty() ? std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125} : cfg.schedule;
    auto prof = boundary_mass(model, E, t);
    const bool exact = is_unit_disc(cfg.domain, false) && cfg.alpha == 0.0 && E.size() == 1 && E[0] == cplx(0.0);
    c.rep.header = {"t", "nu", "exact", "boundary_mass_bound", "flagged"};
    bool ok = true;
    for (const auto& r : prof.rows) {
        double ex = exact ? (2.0 * r.t - r.t * r.t) / pi : std::nan("");
        if (exact && !r.flagged) ok = ok && std::abs(r.nu - ex) <= 1e-6;
        c.row({num(r.t), num(r.nu), num(ex), num(r.boundary_mass_bound), flag(r.flagged)});
    }
    c.rep.results["r_hat"] = prof.r_hat;
    c.rep.results["fit_residual"] = prof.fit_residual;
    c.rep.results["fitted_rows"] = prof.fitted_rows;
    c.check("r_hat_in_[0.85,1.15]", prof.r_hat >= 0.85 && prof.r_hat <= 1.15, "r_hat " + num(prof.r_hat));
    if (exact) c.check("nu_matches_(2t-t^2)/pi_within_1e-6", ok);
}

void run_classify_eta(Ctx& c) {
    const auto& cfg = c.cfg;
    auto cl = classify_condition_1_1(cfg.eta, cfg.dyadic_steps);
    c.rep.header = {"eps", "partial_integral"};
    for (const auto& p : cl.partial_integrals) c.row({num(p.eps), num(p.value)});
    c.rep.results["profile"] = cfg.eta.describe();
    c.rep.results["verdict"] = to_string(cl.verdict);
    c.rep.results["reason"] = cl.reason;
    c.rep.results["head_slope"] = cl.head_slope;
    c.rep.results["tail_slope"] = cl.tail_slope;
    if (cfg.eta.kind == EtaProfile::Kind::tabulated) return;
    // Tabulated route on the same dyadic points, down to where eta underflows.
    std::vector<std::pair<double, double>> s;
    for (int m = 0; m <= cfg.dyadic_steps; ++m) {
        double t = cfg.eta.r0 * std::exp2(-m);
        double v = cfg.eta(t);
        if (!(v > 1e-300)) break;
        s.push_back({t, v});
    }
    if (s.size() < 5) {
        c.rep.results["tabulated_verdict"] = "skipped";
        return;
    }
    auto tab = classify_condition_1_1(EtaProfile::tabulated(s, cfg.eta.r0), cfg.dyadic_steps);
    c.rep.results["tabulated_verdict"] = to_string(tab.verdict);
    c.check("symbolic_and_tabulated_agree", tab.verdict == cl.verdict,
            std::string(to_string(cl.verdict)) + " vs " + to_string(tab.verdict));
}

void run_levi(Ctx& c) {
    const auto& cfg = c.cfg;
    TubeDomain tube{cfg.domain, cfg.k};
    std::vector<std::pair<cplx, cplx>> samples;
    for (const auto& [x, y] : cfg.points) samples.push_back({x, y});
    std::mt19937_64 g(cfg.seed);
    const Disc& o = cfg.domain.outer();
    while (static_cast<int>(samples.size()) < static_cast<int>(cfg.points.size()) + cfg.random_samples) {
        cplx x(uniform(g, o.center.real() - o.radius, o.center.real() + o.radius),
               uniform(g, o.center.imag() - o.radius, o.center.imag() + o.radius));
        double d = cfg.domain.delta(x);
        double r = uniform(g, 0.0, 0.9), th = uniform(g, 0.0, 2.0 * pi);
        if (!(d > 0.01)) continue;
        samples.push_back({x, std::polar(r * d / std::sqrt(cfg.k), th)});
    }
    auto rep = levi_check_tube(tube, samples);
    c.rep.header = {"x1", "x2", "y1", "y2", "min_eigenvalue", "skipped"};
    double dev = 0.0;
    for (const auto& r : rep.rows) {
        if (!r.skipped) dev = std::max(dev, std::abs(r.min_eigenvalue - 0.5 * (cfg.k - 1.0)));
        c.row({num(r.x.real()), num(r.x.imag()), num(r.y.real()), num(r.y.imag()),
               r.skipped ? "" : num(r.min_eigenvalue), flag(r.skipped)});
    }
    c.rep.results["global_min"] = rep.global_min;
    c.rep.results["skipped"] = rep.skipped;
    c.rep.results["max_deviation_from_(k-1)/2"] = dev;
    c.rep.results["psh"] = rep.pass;
    c.check("psh_iff_k_at_least_1", rep.pass == (cfg.k >= 1.0),
            "global min " + num(rep.global_min) + ", k " + num(cfg.k));
}

void run_appendix(Ctx& c) {
    const auto& cfg = c.cfg;
    auto rows = appendix_verifier(cfg.j_lo, cfg.j_hi, cfg.ks);
    c.rep.header = {"j", "t_j", "Lambda_j", "lambda_j", "lower_bound", "pass_planar", "pass_tube"};
    bool planar = true, tube = true, cf = true;
    for (const auto& r : rows) {
        planar = planar && r.pass_planar;
        tube = tube && r.pass_tube;
        cf = cf && r.closed_forms_agree;
        c.row({num(r.j), num(r.t), num(r.Lambda), num(r.lambda), num(r.lower_bound), flag(r.pass_planar),
               flag(r.pass_tube)});
    }
    c.check("planar_sandwich", planar);
    c.check("tube_witness_and_box", tube);
    c.check("enumerated_sup_inf_match_closed_forms", cf);
}

void run_dk_bound(Ctx& c) {
    const auto& cfg = c.cfg;
    if (cfg.probes.empty()) throw ConfigError("/probes", "dk-bound needs the boundary point as probes[0]");
    auto radii = cfg.schedule.empty() ? std::vector<double>{1e-2, 1e-3} : cfg.schedule;
    c.rep.header = {"r_k", "max_ratio", "worst_re", "worst_im", "samples_used", "pass", "error"};
    bool ok = true;
    for (double r : radii) {
        try {
            auto d = dk_bound_check(cfg.domain, cfg.probes[0], r, cfg.samples);
            ok = ok && d.pass;
            c.row({num(r), num(d.max_ratio), num(d.worst_point.real()), num(d.worst_point.imag()),
                   num(d.samples_used), flag(d.pass), ""});
        } catch (const std::exception& e) {
            ok = false;
            c.row({num(r), "", "", "", "", "false", e.what()});
        }
    }
    c.check("ratio_at_most_3", ok);
    if (cfg.random_samples > 0) {
        std::mt19937_64 g(cfg.seed);
        const Disc& o = cfg.domain.outer();
        double worst = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < cfg.random_samples; ++i) {
            auto pick = [&] {
                return cplx(uniform(g, o.center.real() - 1.5 * o.radius, o.center.real() + 1.5 * o.radius),
                            uniform(g, o.center.imag() - 1.5 * o.radius, o.center.imag() + 1.5 * o.radius));
            };
            cplx a = pick(), b = pick();
            worst = std::max(worst, std::abs(cfg.domain.delta(a) - cfg.domain.delta(b)) - std::abs(a - b));
        }
        c.rep.results["lipschitz_worst_excess"] = worst;
        c.check("signed_distance_1_lipschitz", worst <= 1e-12, "worst excess " + num(worst));
    }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& s : scenario_table()) n.push_back(s.name);
        return n;
    }();
    return names;
}

std::vector<ScenarioInfo> list_scenarios() { return scenario_table(); }

json ExperimentConfig::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["domain"] = domain.to_json();
    j["alpha"] = alpha;
    j["N"] = N;
    j["M"] = M;
    j["J"] = J;
    j["depth"] = depth;
    j["k"] = k;
    j["schedule"] = schedule;
    j["probes"] = json::array();
    for (cplx p : probes) j["probes"].push_back(point_json(p));
    j["points"] = json::array();
    for (const auto& [a, b] : points) j["points"].push_back({point_json(a), point_json(b)});
    j["direction"] = point_json(direction);
    j["w"] = point_json(w);
    j["k_lo"] = k_lo;
    j["k_hi"] = k_hi;
    j["samples"] = samples;
    j["enrich_lo"] = enrich_lo;
    j["enrich_hi"] = enrich_hi;
    j["enrich_order"] = enrich_order;
    j["target_hole"] = target_hole;
    j["eta"] = eta_json(eta);
    j["dyadic_steps"] = dyadic_steps;
    j["j_lo"] = j_lo;
    j["j_hi"] = j_hi;
    j["ks"] = ks;
    j["random_samples"] = random_samples;
    j["seed"] = seed;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) bad("", "config must be a JSON object");
    ExperimentConfig c;
    if (!j.contains("scenario") || !j.at("scenario").is_string()) bad("/scenario", "missing");
    c.scenario = j.at("scenario").get<std::string>();
    const auto& names = scenario_names();
    if (std::find(names.begin(), names.end(), c.scenario) == names.end())
        bad("/scenario", "unknown scenario '" + c.scenario + "'");

    for (const auto& item : j.items()) {
        const std::string& key = item.key();
        const json& v = item.value();
        const std::string p = "/" + key;
        if (key == "scenario") continue;
        else if (key == "domain") c.domain = read_domain(v);
        else if (key == "alpha") c.alpha = read_number(v, p);
        else if (key == "N") c.N = read_int(v, p);
        else if (key == "M") c.M = read_int(v, p);
        else if (key == "J") c.J = read_int(v, p);
        else if (key == "depth") c.depth = read_int(v, p);
        else if (key == "k") c.k = read_number(v, p);
        else if (key == "schedule") c.schedule = read_numbers(v, p);
        else if (key == "probes") {
            if (!v.is_array()) bad(p, "expected an array");
            for (std::size_t i = 0; i < v.size(); ++i) c.probes.push_back(read_cplx(v[i], p + "/" + std::to_string(i)));
        } else if (key == "points") {
            if (!v.is_array()) bad(p, "expected an array");
            for (std::size_t i = 0; i < v.size(); ++i) {
                std::string q = p + "/" + std::to_string(i);
                if (!v[i].is_array() || v[i].size() != 2) bad(q, "expected [a, b] with complex entries");
                c.points.push_back({read_cplx(v[i][0], q + "/0"), read_cplx(v[i][1], q + "/1")});
            }
        } else if (key == "direction") c.direction = read_cplx(v, p);
        else if (key == "w") c.w = read_cplx(v, p);
        else if (key == "k_lo") c.k_lo = read_int(v, p);
        else if (key == "k_hi") c.k_hi = read_int(v, p);
        else if (key == "samples") c.samples = read_int(v, p);
        else if (key == "enrich_lo") c.enrich_lo = read_int(v, p);
        else if (key == "enrich_hi") c.enrich_hi = read_int(v, p);
        else if (key == "enrich_order") c.enrich_order = read_int(v, p);
        else if (key == "target_hole") c.target_hole = read_int(v, p);
        else if (key == "eta") c.eta = read_eta(v);
        else if (key == "dyadic_steps") c.dyadic_steps = read_int(v, p);
        else if (key == "j_lo") c.j_lo = read_int(v, p);
        else if (key == "j_hi") c.j_hi = read_int(v, p);
        else if (key == "ks") c.ks = read_numbers(v, p);
        else if (key == "random_samples") c.random_samples = read_int(v, p);
        else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                bad(p, "expected an unsigned 64-bit integer");
            c.seed = v.get<std::uint64_t>();
        } else bad(p, "unknown field");
    }

    check_range(c.N, 0, 64, "/N");
    check_range(c.M, 0, 16, "/M");
    check_range(c.J, 0, 60, "/J");
    check_range(c.depth, 1, 13, "/depth");
    check_range(c.samples, 2, 1 << 20, "/samples");
    check_range(c.enrich_order, 1, 8, "/enrich_order");
    check_range(c.dyadic_steps, 4, 60, "/dyadic_steps");
    check_range(c.random_samples, 0, 1 << 24, "/random_samples");
    if (c.enrich_hi >= c.enrich_lo) {
        check_range(c.enrich_lo, 0, 30, "/enrich_lo");
        check_range(c.enrich_hi, 0, 30, "/enrich_hi");
    }
    if (!(c.alpha >= 0.0)) bad("/alpha", "must be nonnegative");
    if (!(c.k > 0.0)) bad("/k", "must be positive");
    if (!strictly_monotone(c.schedule)) bad("/schedule", "must be strictly monotone");
    for (std::size_t i = 0; i < c.schedule.size(); ++i)
        if (!(c.schedule[i] > 0.0)) bad("/schedule/" + std::to_string(i), "must be positive");
    if (std::abs(c.direction) == 0.0) bad("/direction", "must be nonzero");
    if (c.scenario == "hartogs" || c.scenario == "metric-path")
        if (!(c.alpha > 0.0)) bad("/alpha", "Hartogs exponent must be positive");
    if (c.scenario == "metric-path" || c.scenario == "kobayashi") {
        check_range(c.k_lo, 1, kMaxDyadicIndex, "/k_lo");
        check_range(c.k_hi, c.k_lo, kMaxDyadicIndex, "/k_hi");
    }
    if (c.scenario == "appendix-verify") {
        check_range(c.j_lo, 18, 24, "/j_lo");
        check_range(c.j_hi, c.j_lo, 24, "/j_hi");
        for (std::size_t i = 0; i < c.ks.size(); ++i)
            if (!(c.ks[i] >= 1.0)) bad("/ks/" + std::to_string(i), "must be at least 1");
    }
    return c;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const { return to_json() == o.to_json(); }

bool ExperimentReport::pass() const {
    if (!error.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string ExperimentReport::csv() const {
    std::ostringstream o;
    for (std::size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
    o << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << csv_field(r[i]);
        o << "\n";
    }
    return o.str();
}

json ExperimentReport::summary() const {
    json j;
    j["config"] = config;
    j["environment"] = {{"tool", "bergman-lab"},
                        {"version", BERGMAN_LAB_VERSION},
                        {"float_format", "IEEE-754 binary64, CSV as %.17g"},
                        {"workers", worker_count()}};
    j["results"] = results;
    j["rows"] = rows.size();
    j["checks"] = json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    if (!error.empty()) j["error"] = error;
    j["status"] = pass() ? "PASS" : "FAIL";
    return j;
}

ExperimentReport run(const ExperimentConfig& config) {
    ExperimentReport rep;
    rep.config = config.to_json();
    Ctx c{config, rep};
    try {
        const std::string& s = config.scenario;
        if (s == "kernel") run_kernel(c);
        else if (s == "hartogs") run_hartogs(c);
        else if (s == "converge") run_converge(c);
        else if (s == "density") run_density(c);
        else if (s == "metric-path") run_metric_path(c);
        else if (s == "kobayashi") run_kobayashi(c);
        else if (s == "nu-decay") run_nu_decay(c);
        else if (s == "classify-eta") run_classify_eta(c);
        else if (s == "levi") run_levi(c);
        else if (s == "appendix-verify") run_appendix(c);
        else if (s == "dk-bound") run_dk_bound(c);
        else throw ConfigError("/scenario", "unknown scenario '" + s + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

void write_report(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::string name = report.config.value("scenario", std::string("report"));
    {
        std::ofstream f(fs::path(dir) / (name + ".csv"), std::ios::binary);
        f << report.csv();
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / (name + ".csv")).string());
    }
    std::ofstream f(fs::path(dir) / (name + ".json"), std::ios::binary);
    f << report.summary().dump(2) << "\n";
    if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / (name + ".json")).string());
}

}  // namespace bergman
