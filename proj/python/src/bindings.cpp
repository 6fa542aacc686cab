#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bergman/criteria.hpp"
#include "bergman/errors.hpp"
#include "bergman/experiment.hpp"
#include "bergman/geometry.hpp"
#include "bergman/hartogs.hpp"
#include "bergman/kernel.hpp"
#include "bergman/metric.hpp"

namespace py = pybind11;
using namespace bergman;

namespace {

Weight planar_weight(double alpha) { return alpha > 0.0 ? Weight::neg_log_distance(alpha) : Weight::zero(); }

py::dict appendix_row(const AppendixRow& r) {
    py::dict d;
    d["j"] = r.j;
    d["t"] = r.t;
    d["Lambda"] = r.Lambda;
    d["lambda"] = r.lambda;
    d["lower_bound"] = r.lower_bound;
    d["closed_forms_agree"] = r.closed_forms_agree;
    d["pass_planar"] = r.pass_planar;
    d["pass_tube"] = r.pass_tube;
    return d;
}

py::tuple classification(const Classification& c) {
    std::vector<std::pair<double, double>> partial;
    for (const auto& p : c.partial_integrals) partial.push_back({p.eps, p.value});
    return py::make_tuple(std::string(to_string(c.verdict)), partial);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bergman kernel numerics: planar and Hartogs kernels, metric experiments and boundary criteria";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ScaleUnderflow>(m, "ScaleUnderflow", PyExc_ArithmeticError);

    py::class_<PlanarDomain>(m, "PlanarDomain")
        .def_static("unit_disc", &PlanarDomain::unit_disc)
        .def_static("punctured_disc", &PlanarDomain::punctured_disc)
        .def_static("scaled_zalcman", &scaled_zalcman, py::arg("holes") = 3, py::arg("ratio") = 0.2)
        .def_static("from_json", [](const std::string& s) { return PlanarDomain::from_json(nlohmann::json::parse(s)); })
        .def("to_json", [](const PlanarDomain& d) { return d.to_json().dump(); })
        .def("delta", &PlanarDomain::delta)
        .def("contains", &PlanarDomain::contains);

    py::class_<KernelModel>(m, "KernelModel")
        .def("eval", &KernelModel::eval)
        .def("diagonal", &KernelModel::diagonal)
        .def_property_readonly("dim", &KernelModel::dim)
        .def_property_readonly("jitter_used", &KernelModel::jitter_used)
        .def_property_readonly("max_depth", &KernelModel::max_depth);

    m.def(
        "build_kernel",
        [](const PlanarDomain& d, double alpha, int N, int M, int depth) {
            Weight w = planar_weight(alpha);
            return build_kernel(d, w, BasisSpec::standard(d, w, N, M), depth);
        },
        py::arg("domain"), py::arg("alpha") = 0.0, py::arg("N") = 12, py::arg("M") = 8, py::arg("depth") = 9,
        py::call_guard<py::gil_scoped_release>());
    m.def("kernel_eval", &kernel_eval);
    m.def(
        "metric",
        [](const KernelModel& km, cplx z, cplx xi) { return metric_at(km, z, xi).value; }, py::arg("model"),
        py::arg("z"), py::arg("direction") = cplx(1.0));

    py::class_<HartogsKernel>(m, "HartogsKernel").def_property_readonly("J", &HartogsKernel::J);
    m.def(
        "build_hartogs_kernel",
        [](const PlanarDomain& d, double alpha, int J, int N, int M, int depth) {
            HartogsDomain h{d, alpha};
            return build_hartogs_kernel(h, J, standard_fiber_basis(d, N, M), depth);
        },
        py::arg("domain"), py::arg("alpha") = 1.0, py::arg("J") = 20, py::arg("N") = 10, py::arg("M") = 4,
        py::arg("depth") = 8, py::call_guard<py::gil_scoped_release>());
    m.def(
        "hartogs_eval",
        [](const HartogsKernel& hk, cplx z, cplx w, cplx t, cplx s) {
            auto v = hartogs_kernel_eval(hk, z, w, t, s);
            return py::make_tuple(v.value, v.tail_bound, v.terms, v.tail_flag);
        },
        py::arg("hk"), py::arg("z"), py::arg("w"), py::arg("t"), py::arg("s"));

    m.def(
        "classify_power_law",
        [](double C, double alpha, double r0) { return classification(classify_condition_1_1(EtaProfile::power_law(C, alpha, r0))); },
        py::arg("C"), py::arg("alpha"), py::arg("r0") = 0.5);
    m.def(
        "classify_stretched_exponential",
        [](double C, double C1, double beta, double r0) {
            return classification(classify_condition_1_1(EtaProfile::stretched_exponential(C, C1, beta, r0)));
        },
        py::arg("C"), py::arg("C1"), py::arg("beta"), py::arg("r0") = 0.5);
    m.def(
        "classify_tabulated",
        [](std::vector<std::pair<double, double>> samples, double r0) {
            return classification(classify_condition_1_1(EtaProfile::tabulated(std::move(samples), r0)));
        },
        py::arg("samples"), py::arg("r0"));
    m.def("beta_alpha_gate", &beta_alpha_gate, py::arg("alpha"), py::arg("beta"));
    m.def(
        "levi_min_eigenvalue",
        [](const PlanarDomain& d, double k, std::vector<std::pair<cplx, cplx>> samples) {
            auto r = levi_check_tube({d, k}, samples);
            return py::make_tuple(r.global_min, r.skipped, r.pass);
        },
        py::arg("domain"), py::arg("k"), py::arg("samples"));
    m.def(
        "appendix_verifier",
        [](int j_lo, int j_hi, std::vector<double> ks) {
            py::list out;
            for (const auto& r : appendix_verifier(j_lo, j_hi, ks)) out.append(appendix_row(r));
            return out;
        },
        py::arg("j_lo") = 18, py::arg("j_hi") = 24, py::arg("ks") = std::vector<double>{1.0, 4.0});

    m.def("list_scenarios", [] {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& s : list_scenarios()) out.emplace_back(s.name, s.description, s.exercises);
        return out;
    });
    m.def(
        "run_scenario",
        [](const std::string& config_json) {
            auto cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
            ExperimentReport rep;
            {
                py::gil_scoped_release release;
                rep = run(cfg);
            }
            return py::make_tuple(rep.csv(), rep.summary().dump(), rep.pass());
        },
        py::arg("config_json"));
}
