#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mflab/dyadic.hpp"
#include "mflab/generators.hpp"
#include "mflab/genspace.hpp"
#include "mflab/io.hpp"
#include "mflab/leaders.hpp"
#include "mflab/oracles.hpp"
#include "mflab/spectra.hpp"

namespace py = pybind11;
using namespace mflab;

namespace {

std::vector<double> row_values(const std::vector<std::vector<ExpCode>>& code, int j) {
    if (j < 0 || j >= int(code.size())) throw py::index_error("scale out of range");
    std::vector<double> out;
    out.reserve(code[j].size());
    for (ExpCode c : code[j]) out.push_back(code_to_value(c));
    return out;
}

GeneratorSpec spec_from_kwargs(const py::kwargs& kw) {
    GeneratorSpec s;
    for (auto item : kw) {
        std::string key = py::cast<std::string>(item.first);
        if (key == "construction") s.construction = py::cast<std::string>(item.second);
        else if (key == "alpha") s.alpha = py::cast<double>(item.second);
        else if (key == "beta") s.beta = py::cast<double>(item.second);
        else if (key == "gamma") s.gamma = py::cast<double>(item.second);
        else if (key == "eta") s.eta = py::cast<double>(item.second);
        else if (key == "C") s.C = py::cast<double>(item.second);
        else if (key == "m") s.m = py::cast<double>(item.second);
        else if (key == "r") {
            auto pair = py::cast<std::pair<std::int64_t, std::int64_t>>(item.second);
            s.r_num = pair.first;
            s.r_den = pair.second;
        } else if (key == "jmax") s.jmax = py::cast<int>(item.second);
        else if (key == "source_jmax") s.source_jmax = py::cast<int>(item.second);
        else if (key == "seed") s.seed = py::cast<std::uint64_t>(item.second);
        else if (key == "background_gamma")
            s.background_gamma = py::cast<double>(item.second);
        else if (key == "duplicate_source")
            s.duplicate_source = py::cast<std::string>(item.second);
        else throw py::value_error("unknown generator field: " + key);
    }
    return s;
}

}  // namespace

PYBIND11_MODULE(_mflab, m) {
    m.doc() = "wavelet-leader multifractal analysis core";

    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_IOError);

    py::class_<CoefficientField>(m, "CoefficientField")
        .def_readonly("jmax", &CoefficientField::jmax)
        .def("values", [](const CoefficientField& f, int j) {
            return row_values(f.code, j);
        })
        .def("cell_count", &CoefficientField::cell_count)
        .def_property_readonly("construction",
                               [](const CoefficientField& f) { return f.meta.construction; })
        .def_property_readonly("params",
                               [](const CoefficientField& f) { return f.meta.params; });

    py::class_<LeaderField>(m, "LeaderField")
        .def_readonly("jmax", &LeaderField::jmax)
        .def("values", [](const LeaderField& f, int j) { return row_values(f.code, j); })
        .def_readonly("truncation_bias", &LeaderField::truncation_bias);

    py::class_<SpectrumCurve>(m, "SpectrumCurve")
        .def_readonly("grid", &SpectrumCurve::grid)
        .def_readonly("values", &SpectrumCurve::values)
        .def_readonly("at_infinity", &SpectrumCurve::at_infinity)
        .def_property_readonly("kind", [](const SpectrumCurve& c) {
            return curve_kind_name(c.kind);
        });

    py::class_<EstimatorConfig>(m, "EstimatorConfig")
        .def(py::init<>())
        .def_readwrite("j1", &EstimatorConfig::j1)
        .def_readwrite("j2", &EstimatorConfig::j2)
        .def_readwrite("p_grid", &EstimatorConfig::p_grid)
        .def_readwrite("h_grid", &EstimatorConfig::h_grid)
        .def_readwrite("eps_schedule", &EstimatorConfig::eps_schedule)
        .def_readwrite("min_count", &EstimatorConfig::min_count)
        .def_readwrite("weighted_fit", &EstimatorConfig::weighted_fit)
        .def_property(
            "rho_method",
            [](const EstimatorConfig& c) {
                return c.rho_method == RhoMethod::BandMax ? "bandmax" : "hullslope";
            },
            [](EstimatorConfig& c, const std::string& v) {
                if (v == "bandmax") c.rho_method = RhoMethod::BandMax;
                else if (v == "hullslope") c.rho_method = RhoMethod::HullSlope;
                else throw py::value_error("rho_method must be bandmax or hullslope");
            });

    // generators
    m.def("two_exponent", &gen_two_exponent, py::arg("alpha"), py::arg("beta"),
          py::arg("eta"), py::arg("jmax"));
    m.def("three_exponent", &gen_three_exponent, py::arg("alpha"), py::arg("beta"),
          py::arg("gamma"), py::arg("eta"), py::arg("C"), py::arg("jmax"));
    m.def("asymmetric_cantor", &gen_asymmetric_cantor, py::arg("alpha"),
          py::arg("beta"), py::arg("jmax"));
    m.def("slow_oscillation",
          [](double alpha, double beta, int jmax) {
              return gen_slow_oscillation(alpha, beta, jmax);
          },
          py::arg("alpha"), py::arg("beta"), py::arg("jmax"));
    m.def("lws_cantor", &gen_lws_cantor, py::arg("r_num"), py::arg("r_den"),
          py::arg("alpha"), py::arg("eta"), py::arg("seed"), py::arg("jmax"));
    m.def("duplicated_lws", &gen_duplicated_lws, py::arg("alpha"), py::arg("eta"),
          py::arg("seed"), py::arg("jmax"));
    m.def("duplicate", &gen_duplicate, py::arg("src"), py::arg("m"),
          py::arg("target_jmax"), py::arg("with_leaders") = true);
    m.def("background_fill", &background_fill, py::arg("field"), py::arg("gamma"));
    m.def("build_field", [](const py::kwargs& kw) {
        return build_field(spec_from_kwargs(kw));
    });

    // leaders
    m.def("compute_leaders", &compute_leaders);
    m.def("leader_sequence_at", &leader_sequence_at, py::arg("x"), py::arg("leaders"));
    m.def("holder_estimate",
          [](double x, const LeaderField& lf, int j1, int j2) {
              HolderEstimate e = holder_estimate(x, lf, j1, j2);
              return py::dict(py::arg("hhat") = e.hhat, py::arg("slope") = e.slope,
                              py::arg("zero_leaders") = e.zero_leaders,
                              py::arg("all_zero") = e.all_zero);
          },
          py::arg("x"), py::arg("leaders"), py::arg("j1"), py::arg("j2"));

    // spectra
    m.def("large_deviation",
          [](const std::vector<const LeaderField*>& fields, const EstimatorConfig& cfg) {
              auto res = large_deviation(fields, cfg);
              return py::dict(py::arg("rho") = res.rho,
                              py::arg("eps_used") = res.eps_used,
                              py::arg("eps_schedule") = res.eps_schedule,
                              py::arg("value_per_eps") = res.value_per_eps,
                              py::arg("a_sweep") = res.a_sweep,
                              py::arg("rho_at_A") = res.rho_at_A,
                              py::arg("zero_cells") = res.zero_cells);
          },
          py::arg("fields"), py::arg("config") = EstimatorConfig());
    m.def("increasing_hull",
          [](const std::vector<const LeaderField*>& fields, const EstimatorConfig& cfg) {
              return increasing_hull(fields, cfg);
          },
          py::arg("fields"), py::arg("config") = EstimatorConfig());
    m.def("scaling_function",
          [](const std::vector<const LeaderField*>& fields, const EstimatorConfig& cfg) {
              ScalingFunction sf = scaling_function(fields, cfg);
              return py::dict(py::arg("p") = sf.p, py::arg("eta") = sf.eta,
                              py::arg("slope") = sf.slope);
          },
          py::arg("fields"), py::arg("config") = EstimatorConfig());
    m.def("legendre_spectrum",
          [](const std::vector<const LeaderField*>& fields, const EstimatorConfig& cfg) {
              EstimatorConfig c = cfg;
              std::vector<double> grid =
                  c.h_grid.empty() ? derive_h_grid(fields, c) : c.h_grid;
              return legendre_spectrum(scaling_function(fields, c), grid);
          },
          py::arg("fields"), py::arg("config") = EstimatorConfig());
    m.def("concave_hull", &concave_hull);
    m.def("hminmax", [](const LeaderField& lf, int j1, int j2) {
        HMinMax hm = hminmax(lf, j1, j2);
        return std::make_pair(hm.hmin, hm.hmax);
    });

    // oracles
    m.def("oracle", [](const py::kwargs& kw) {
        std::vector<double> grid;
        py::kwargs rest;
        for (auto item : kw) {
            if (py::cast<std::string>(item.first) == "h_grid")
                grid = py::cast<std::vector<double>>(item.second);
            else
                rest[item.first] = item.second;
        }
        OracleSpectra o = oracle(spec_from_kwargs(rest), grid);
        return py::dict(py::arg("D") = o.D, py::arg("rho") = o.rho, py::arg("L") = o.L,
                        py::arg("failure_gap") = o.failure_gap);
    });
    m.def("compare",
          [](const SpectrumCurve& est, const SpectrumCurve& orc, double tol,
             double support_tol, double mismatch_floor) {
              CompareReport r = compare(est, orc, {tol, support_tol, mismatch_floor});
              return py::dict(py::arg("sup_distance") = r.sup_distance,
                              py::arg("witness_h") = r.witness_h,
                              py::arg("support_mismatch") = r.support_mismatch,
                              py::arg("verdict") = r.verdict());
          },
          py::arg("estimate"), py::arg("oracle"), py::arg("tol") = 0.1,
          py::arg("support_tol") = 0.45, py::arg("mismatch_floor") = 0.25);

    // generalized-smoothness spaces
    py::class_<AdmissibleSequence>(m, "AdmissibleSequence")
        .def_readonly("jmax", &AdmissibleSequence::jmax)
        .def_readonly("log2_sigma", &AdmissibleSequence::log2_sigma)
        .def("admissibility_constant_log2",
             &AdmissibleSequence::admissibility_constant_log2);
    m.def("make_oscillating", &make_oscillating, py::arg("alpha"), py::arg("beta"),
          py::arg("jmax"));
    m.def("boyd_indices", [](const AdmissibleSequence& seq) {
        BoydIndices b = boyd_indices(seq);
        return std::make_pair(b.lower, b.upper);
    });
    m.def("lambda_sigma_norm", &lambda_sigma_norm);
    m.def("cn_project", &cn_project, py::arg("field"), py::arg("seq"), py::arg("N"));
    m.def("leadersuite_check", [](const CoefficientField& f, const AdmissibleSequence& s) {
        return leadersuite_check(f, s).C;
    });

    // dyadic helpers
    m.def("cantor_dimension", [](std::int64_t p, std::int64_t q) {
        return cantor_dimension(CantorSpec::symmetric(p, q));
    });
    m.def("asymmetric_cantor_dimension",
          []() { return cantor_dimension(CantorSpec::asymmetric_quarter()); });
    m.def("gamma_j_count", [](std::int64_t p, std::int64_t q, int j) {
        return gamma_j(CantorSpec::symmetric(p, q), j).size();
    });
    m.def("duplicated_gamma_j_count", [](int j) {
        return gamma_j(CantorSpec::quarter_symmetric_duplicated(), j).size();
    });
    m.def("r_j_count", [](int j) { return r_j(j).size(); });

    // file formats
    m.def("write_field", [](const std::string& path, const CoefficientField& f) {
        write_field(path, f);
    });
    m.def("read_field", [](const std::string& path) { return read_field_any(path); });
    m.def("write_curve_csv", &write_curve_csv);
    m.def("read_curve_csv", &read_curve_csv);
}
