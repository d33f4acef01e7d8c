#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arw/chaos.hpp"
#include "arw/crossings.hpp"
#include "arw/curve.hpp"
#include "arw/experiment.hpp"
#include "arw/field.hpp"
#include "arw/kacrice.hpp"
#include "arw/lattice.hpp"
#include "arw/rng.hpp"

namespace py = pybind11;
using namespace arw;

PYBIND11_MODULE(_arwave, m) {
    m.doc() = "nodal intersection statistics of arithmetic random waves";
    m.attr("__version__") = kCodeVersion;

    py::register_exception<NotRepresentable>(m, "NotRepresentable");
    py::register_exception<LevelTooLarge>(m, "LevelTooLarge");
    py::register_exception<RegimeMismatch>(m, "RegimeMismatch");
    py::register_exception<DegenerateDenominator>(m, "DegenerateDenominator");
    py::register_exception<ConfigInvalid>(m, "ConfigInvalid");

    // lattice
    py::class_<LatticePoint>(m, "LatticePoint")
        .def_readonly("x", &LatticePoint::x)
        .def_readonly("y", &LatticePoint::y)
        .def("__repr__", [](const LatticePoint& p) {
            return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
        });
    py::class_<EnergyLevel>(m, "EnergyLevel")
        .def_readonly("n", &EnergyLevel::n)
        .def_readonly("eigenvalue", &EnergyLevel::eigenvalue)
        .def_readonly("count", &EnergyLevel::count)
        .def_readonly("points", &EnergyLevel::points)
        .def_readonly("half_points", &EnergyLevel::half_points)
        .def_readonly("angles", &EnergyLevel::angles)
        .def("alpha", &EnergyLevel::alpha);
    py::class_<SpectralMeasure>(m, "SpectralMeasure")
        .def_readonly("angles", &SpectralMeasure::angles)
        .def_readonly("weights", &SpectralMeasure::weights)
        .def_static("uniform", &SpectralMeasure::uniform)
        .def_static("cilleruelo", &SpectralMeasure::cilleruelo)
        .def_static("tilted_cilleruelo", &SpectralMeasure::tilted_cilleruelo)
        .def_static("from_level", &SpectralMeasure::from_level)
        .def_static("atomic", &SpectralMeasure::atomic);
    py::class_<SeparationStats>(m, "SeparationStats")
        .def_readonly("min_sep", &SeparationStats::min_sep)
        .def_readonly("is_delta_separated", &SeparationStats::is_delta_separated);
    py::class_<OffdiagonalSums>(m, "OffdiagonalSums")
        .def_readonly("min_nonzero_norm", &OffdiagonalSums::min_nonzero_norm)
        .def_readonly("reciprocal_sum", &OffdiagonalSums::reciprocal_sum);

    m.def("is_representable", &is_representable, py::arg("n"));
    m.def("enumerate_level", &enumerate_level, py::arg("n"));
    m.def("spectral_measure", &spectral_measure);
    m.def("mu_hat", &mu_hat, py::arg("measure"), py::arg("k"));
    m.def("separation_stats", &separation_stats, py::arg("level"), py::arg("delta"));
    m.def("spectral_correlations", &spectral_correlations, py::arg("level"),
          py::arg("order"), py::arg("max_count") = 64);
    m.def("offdiagonal_sums", &offdiagonal_sums, py::arg("level"), py::arg("order"),
          py::arg("max_count") = 64);
    m.def(
        "direction_identity_check",
        [](const EnergyLevel& level, double zx, double zy) {
            return direction_identity_check(level, Vec2{zx, zy});
        },
        py::arg("level"), py::arg("zx"), py::arg("zy"));

    // curve
    py::class_<CurveSpec>(m, "CurveSpec")
        .def_static("circle", &CurveSpec::circle, py::arg("cx"), py::arg("cy"),
                    py::arg("radius"))
        .def_static("ellipse", &CurveSpec::ellipse, py::arg("cx"), py::arg("cy"),
                    py::arg("a"), py::arg("b"), py::arg("rotation") = 0.0)
        .def_static("flower", &CurveSpec::flower, py::arg("cx"), py::arg("cy"),
                    py::arg("r0"), py::arg("eps"), py::arg("k"), py::arg("phase") = 0.0)
        .def_static("arc", &CurveSpec::arc, py::arg("cx"), py::arg("cy"), py::arg("radius"),
                    py::arg("angle0"), py::arg("angle1"));
    py::class_<UnitSpeedCurve>(m, "UnitSpeedCurve")
        .def_property_readonly("length", &UnitSpeedCurve::length)
        .def_property_readonly("closed", &UnitSpeedCurve::closed)
        .def("position",
             [](const UnitSpeedCurve& c, double t) {
                 Vec2 p = c.position(t);
                 return std::make_pair(p.x, p.y);
             })
        .def("tangent_angle", &UnitSpeedCurve::tangent_angle)
        .def("curvature", &UnitSpeedCurve::curvature);
    py::class_<FgProfiles>(m, "FgProfiles")
        .def_readonly("t", &FgProfiles::t)
        .def_readonly("f", &FgProfiles::f)
        .def_readonly("g", &FgProfiles::g)
        .def_readonly("int_f2", &FgProfiles::int_f2)
        .def_readonly("int_fg", &FgProfiles::int_fg)
        .def_readonly("int_g2", &FgProfiles::int_g2);
    py::class_<LimitCoefficients>(m, "LimitCoefficients")
        .def_readonly("a1", &LimitCoefficients::a1)
        .def_readonly("a2", &LimitCoefficients::a2)
        .def_readonly("a3", &LimitCoefficients::a3);

    m.def("build_unit_speed", &build_unit_speed, py::arg("spec"),
          py::arg("resolution") = 2048.0);
    m.def("I_gamma", &I_gamma);
    m.def("is_static", &is_static, py::arg("curve"), py::arg("tol") = 1e-8);
    m.def("directional_energy", &directional_energy, py::arg("curve"), py::arg("theta"));
    m.def("B_functional", &B_functional);
    m.def("A_functional", &A_functional);
    m.def("F_functional", &F_functional);
    m.def("fg_profiles", &fg_profiles);
    m.def("limit_coefficients", &limit_coefficients, py::arg("curve"), py::arg("mu_hat4"));

    // field + crossings
    py::class_<WaveSample>(m, "WaveSample")
        .def_readonly("seed", &WaveSample::seed)
        .def_readonly("trial", &WaveSample::trial)
        .def_readonly("coeffs", &WaveSample::coeffs);
    py::class_<RestrictedProcess>(m, "RestrictedProcess")
        .def_readonly("t", &RestrictedProcess::t)
        .def_readonly("f", &RestrictedProcess::f)
        .def_readonly("fp", &RestrictedProcess::fp)
        .def("eval", &RestrictedProcess::eval)
        .def("eval_deriv", &RestrictedProcess::eval_deriv);
    py::class_<CovarianceBundle>(m, "CovarianceBundle")
        .def_readonly("r", &CovarianceBundle::r)
        .def_readonly("r1", &CovarianceBundle::r1)
        .def_readonly("r2", &CovarianceBundle::r2)
        .def_readonly("r12", &CovarianceBundle::r12);
    py::class_<CrossingCount>(m, "CrossingCount")
        .def_readonly("count", &CrossingCount::count)
        .def_readonly("suspicious", &CrossingCount::suspicious)
        .def_readonly("refinement_depth", &CrossingCount::refinement_depth);
    py::class_<MonteCarloSummary>(m, "MonteCarloSummary")
        .def_readonly("n", &MonteCarloSummary::n)
        .def_readonly("trials", &MonteCarloSummary::trials)
        .def_readonly("counts", &MonteCarloSummary::counts)
        .def_readonly("empirical_mean", &MonteCarloSummary::empirical_mean)
        .def_readonly("empirical_variance", &MonteCarloSummary::empirical_variance)
        .def_readonly("theoretical_mean", &MonteCarloSummary::theoretical_mean)
        .def_readonly("theoretical_variance", &MonteCarloSummary::theoretical_variance)
        .def_readonly("standardized", &MonteCarloSummary::standardized)
        .def_readonly("ks_normal", &MonteCarloSummary::ks_normal)
        .def_readonly("ks_static_circle", &MonteCarloSummary::ks_static_circle)
        .def_readonly("ks_limit_law", &MonteCarloSummary::ks_limit_law)
        .def_readonly("flag_rate", &MonteCarloSummary::flag_rate)
        .def_readonly("even_fraction", &MonteCarloSummary::even_fraction);

    m.def("sample_coefficients", &sample_coefficients, py::arg("level"), py::arg("seed"),
          py::arg("trial"), py::keep_alive<0, 1>());
    m.def(
        "evaluate_wave",
        [](const WaveSample& s, double x, double y) {
            return evaluate_wave(s, Vec2{x, y});
        },
        py::arg("sample"), py::arg("x"), py::arg("y"));
    m.def("evaluate_restricted", &evaluate_restricted, py::arg("sample"), py::arg("curve"),
          py::arg("samples_per_wavelength"), py::keep_alive<0, 1>(),
          py::keep_alive<0, 2>());
    m.def("covariance_bundle", &covariance_bundle, py::arg("level"), py::arg("curve"),
          py::arg("t1"), py::arg("t2"));
    m.def(
        "count_zeros",
        [](const RestrictedProcess& p, double refine_tol) {
            return count_zeros(p, refine_tol);
        },
        py::arg("process"), py::arg("refine_tol") = 1e-10);
    m.def("expected_count", &expected_count, py::arg("n"), py::arg("L"));
    py::enum_<Regime>(m, "Regime").value("Generic", Regime::Generic).value("Static",
                                                                           Regime::Static);
    m.def("variance_prediction", &variance_prediction, py::arg("level"), py::arg("curve"),
          py::arg("regime"));
    m.def("run_campaign", &run_campaign, py::arg("level"), py::arg("curve"),
          py::arg("trials"), py::arg("seed"), py::arg("resolution") = 20.0,
          py::call_guard<py::gil_scoped_release>());
    py::enum_<ReferenceLaw>(m, "ReferenceLaw")
        .value("StdNormal", ReferenceLaw::StdNormal)
        .value("StaticCircle", ReferenceLaw::StaticCircle);
    m.def("ks_distance",
          py::overload_cast<std::vector<double>, ReferenceLaw>(&ks_distance));
    m.def("ks_distance_two_sample",
          py::overload_cast<std::vector<double>, std::vector<double>>(&ks_distance));

    // chaos
    py::class_<GaussianStream>(m, "GaussianStream")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"),
             py::arg("stream") = 0)
        .def("next", &GaussianStream::next)
        .def("next_unit", &GaussianStream::next_unit);
    py::class_<ChaosCoefficients>(m, "ChaosCoefficients")
        .def_readonly("b", &ChaosCoefficients::b)
        .def_readonly("a", &ChaosCoefficients::a);
    py::class_<Projection2>(m, "Projection2")
        .def_readonly("z2a", &Projection2::z2a)
        .def_readonly("z2b", &Projection2::z2b);
    py::class_<Projection4>(m, "Projection4")
        .def_readonly("z4a", &Projection4::z4a)
        .def_readonly("z4a_static", &Projection4::z4a_static);
    py::class_<WFunctionals>(m, "WFunctionals")
        .def_readonly("W1", &WFunctionals::W1)
        .def_readonly("int_W2", &WFunctionals::int_W2)
        .def_readonly("identity_residual", &WFunctionals::identity_residual)
        .def_readonly("W2_profile", &WFunctionals::W2_profile);
    py::class_<ChaosProjector>(m, "ChaosProjector")
        .def(py::init<const EnergyLevel&, const UnitSpeedCurve&>(), py::keep_alive<1, 2>(),
             py::keep_alive<1, 3>())
        .def("project_2", &ChaosProjector::project_2)
        .def("project_4", &ChaosProjector::project_4, py::arg("sample"),
             py::arg("route_tol") = 1e-8)
        .def("W_functionals", &ChaosProjector::W_functionals, py::arg("sample"),
             py::arg("with_profile") = false)
        .def("z0", &ChaosProjector::z0)
        .def("predicted_var_z2a", &ChaosProjector::predicted_var_z2a)
        .def("predicted_var_z4a", &ChaosProjector::predicted_var_z4a);
    py::class_<MLawSpec>(m, "MLawSpec")
        .def_readonly("a1", &MLawSpec::a1)
        .def_readonly("a2", &MLawSpec::a2)
        .def_readonly("a3", &MLawSpec::a3)
        .def_readonly("denom", &MLawSpec::denom);
    py::class_<LimitLawSamplerI>(m, "LimitLawSamplerI")
        .def(py::init<const UnitSpeedCurve&, const SpectralMeasure&, int>(),
             py::arg("curve"), py::arg("measure"), py::arg("grid_size") = 512,
             py::keep_alive<1, 2>())
        .def("draw", &LimitLawSamplerI::draw)
        .def("denominator", &LimitLawSamplerI::denominator)
        .def("deterministic_term", &LimitLawSamplerI::deterministic_term);
    py::class_<SigmaNDiagonalization>(m, "SigmaNDiagonalization")
        .def_readonly("sigma", &SigmaNDiagonalization::sigma)
        .def_readonly("eigenvalues_numeric", &SigmaNDiagonalization::eigenvalues_numeric)
        .def_readonly("eigenvalues_closed_form",
                      &SigmaNDiagonalization::eigenvalues_closed_form);

    m.def("hermite", &hermite, py::arg("k"), py::arg("x"));
    m.def("chaos_coefficients", &chaos_coefficients, py::arg("max_q"));
    m.def("m_law_unreconciled", &m_law_unreconciled);
    m.def("m_law_reconciled", &m_law_reconciled);
    m.def("sample_limit_M",
          py::overload_cast<const MLawSpec&, GaussianStream&>(&sample_limit_M));
    m.def("sample_limit_I", &sample_limit_I);
    m.def("diagonalize_N", &diagonalize_N, py::arg("mu_hat4"));

    // kacrice
    py::class_<CorrelationPoint>(m, "CorrelationPoint")
        .def(py::init([](double t1, double t2, double r, double r1, double r2, double r12) {
                 return CorrelationPoint{t1, t2, r, r1, r2, r12};
             }),
             py::arg("t1"), py::arg("t2"), py::arg("r"), py::arg("r1"), py::arg("r2"),
             py::arg("r12"))
        .def_readonly("r", &CorrelationPoint::r)
        .def_readonly("r1", &CorrelationPoint::r1)
        .def_readonly("r2", &CorrelationPoint::r2)
        .def_readonly("r12", &CorrelationPoint::r12);
    py::class_<VarianceNumeric>(m, "VarianceNumeric")
        .def_readonly("variance", &VarianceNumeric::variance)
        .def_readonly("integral_K2", &VarianceNumeric::integral_K2)
        .def_readonly("singular_area_ratio", &VarianceNumeric::singular_area_ratio)
        .def_readonly("band_delta", &VarianceNumeric::band_delta);
    py::class_<MomentRow>(m, "MomentRow")
        .def_readonly("name", &MomentRow::name)
        .def_readonly("value", &MomentRow::value)
        .def_readonly("prediction", &MomentRow::prediction)
        .def_readonly("ratio", &MomentRow::ratio);

    m.def("correlation_point", &correlation_point);
    m.def("K1", &K1, py::arg("n"));
    m.def("K2_exact", &K2_exact, py::arg("point"), py::arg("alpha"), py::arg("eps") = 1e-3);
    m.def("K2_taylor", &K2_taylor, py::arg("point"), py::arg("alpha"));
    m.def("variance_numeric", &variance_numeric, py::arg("level"), py::arg("curve"),
          py::arg("c0") = 0.5, py::call_guard<py::gil_scoped_release>());
    m.def("variance_approx_static", &variance_approx_static, py::arg("level"),
          py::arg("curve"), py::arg("c0") = 0.5,
          py::call_guard<py::gil_scoped_release>());
    m.def("moment_integrals", &moment_integrals, py::arg("level"), py::arg("curve"),
          py::arg("orders") = std::vector<int>{2, 4, 6},
          py::call_guard<py::gil_scoped_release>());

    // experiment front door
    m.def("run_experiment_file", [](const std::string& path) {
        RunManifest manifest = run_experiment(load_config(path));
        return manifest_to_json(manifest);
    });
}
