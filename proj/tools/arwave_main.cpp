#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <iostream>
#include <memory>

#include "arw/chaos.hpp"
#include "arw/crossings.hpp"
#include "arw/curve.hpp"
#include "arw/experiment.hpp"
#include "arw/field.hpp"
#include "arw/kacrice.hpp"
#include "arw/lattice.hpp"

using nlohmann::json;

namespace {

struct CurveOptions {
    std::string family = "circle";
    std::vector<double> center{0.5, 0.5};
    double radius = 0.2;
    double a = 0.25, b = 0.15;
    double r0 = 0.2, eps = 0.05, phase = 0.0;
    int k = 3;
    double rotation = 0.0;
    double angle0 = 0.0, angle1 = 3.141592653589793;

    void attach(CLI::App* app) {
        app->add_option("--family", family, "circle | ellipse | flower | arc");
        app->add_option("--center", center, "curve center (two coordinates)")->expected(2);
        app->add_option("--radius", radius, "circle/arc radius");
        app->add_option("--a", a, "ellipse semi-major axis");
        app->add_option("--b", b, "ellipse semi-minor axis");
        app->add_option("--r0", r0, "flower base radius");
        app->add_option("--eps", eps, "flower modulation amplitude");
        app->add_option("--k", k, "flower symmetry order");
        app->add_option("--phase", phase, "flower phase");
        app->add_option("--rotation", rotation, "rigid rotation about the center");
        app->add_option("--angle0", angle0, "arc start angle");
        app->add_option("--angle1", angle1, "arc end angle");
    }

    arw::CurveSpec spec() const {
        std::map<std::string, std::string> kv;
        kv["family"] = family;
        kv["center"] = std::to_string(center[0]) + " " + std::to_string(center[1]);
        kv["radius"] = std::to_string(radius);
        kv["a"] = std::to_string(a);
        kv["b"] = std::to_string(b);
        kv["r0"] = std::to_string(r0);
        kv["eps"] = std::to_string(eps);
        kv["k"] = std::to_string(k);
        kv["phase"] = std::to_string(phase);
        kv["rotation"] = std::to_string(rotation);
        kv["angle0"] = std::to_string(angle0);
        kv["angle1"] = std::to_string(angle1);
        return arw::curve_from_kv(kv);
    }
};

arw::SpectralMeasure measure_from_string(const std::string& name) {
    if (name == "uniform") return arw::SpectralMeasure::uniform();
    if (name == "cilleruelo") return arw::SpectralMeasure::cilleruelo();
    if (name == "tilted") return arw::SpectralMeasure::tilted_cilleruelo();
    if (name.rfind("level:", 0) == 0) {
        long long n = std::stoll(name.substr(6));
        return arw::spectral_measure(arw::enumerate_level(n));
    }
    throw arw::ConfigInvalid("unknown measure: " + name);
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << j.dump(2) << std::endl;
    else
        arw::write_file(out_path, j.dump(2) + "\n");
}

int cmd_lattice(long long n, double delta, int order, const std::string& out) {
    arw::EnergyLevel level = arw::enumerate_level(n);
    arw::SeparationStats sep = arw::separation_stats(level, delta);
    json points = json::array();
    for (const auto& p : level.points) points.push_back({p.x, p.y});

    json j{{"n", level.n},
           {"N", level.count},
           {"points", points},
           {"min_sep", sep.min_sep},
           {"delta", delta},
           {"is_delta_separated", sep.is_delta_separated},
           {"mu_hat4", arw::mu_hat(arw::spectral_measure(level), 4).real()}};
    if (level.count <= 64) {
        j["s4"] = arw::spectral_correlations(level, 4);
        j["s4_formula"] = 3LL * level.count * (level.count - 1);
        arw::OffdiagonalSums off4 = arw::offdiagonal_sums(level, 4);
        j["offdiag"] = {{"order", 4},
                        {"min_nonzero_norm", off4.min_nonzero_norm},
                        {"reciprocal_sum", off4.reciprocal_sum}};
        if (order == 6) {
            j["s6"] = arw::spectral_correlations(level, 6);
            arw::OffdiagonalSums off6 = arw::offdiagonal_sums(level, 6);
            j["offdiag6"] = {{"order", 6},
                             {"min_nonzero_norm", off6.min_nonzero_norm},
                             {"reciprocal_sum", off6.reciprocal_sum}};
        }
    }
    emit(j, out);
    return 0;
}

int cmd_curve(const CurveOptions& copts, const std::string& measure_name,
              const std::string& out) {
    arw::UnitSpeedCurve curve = arw::build_unit_speed(copts.spec());
    arw::SpectralMeasure mu = measure_from_string(measure_name);
    arw::CurveFunctionals fn = arw::curve_functionals(curve);
    double mu4 = arw::mu_hat(mu, 4).real();
    arw::LimitCoefficients lc = arw::limit_coefficients(curve, mu4);
    double Bmu = arw::B_functional(curve, mu);
    double Amu = arw::A_functional(curve, mu);
    double L = curve.length();

    json j{{"curve", arw::curve_identifier(copts.spec())},
           {"length", L},
           {"I_re", fn.I.real()},
           {"I_im", fn.I.imag()},
           {"abs_I", std::abs(fn.I)},
           {"is_static", fn.is_static},
           {"measure", measure_name},
           {"mu_hat4", mu4},
           {"B", Bmu},
           {"A", Amu},
           {"4B_minus_L2", 4.0 * Bmu - L * L},
           {"16A_minus_L2", 16.0 * Amu - L * L},
           {"int_f2", fn.int_f2},
           {"int_fg", fn.int_fg},
           {"int_g2", fn.int_g2},
           {"a1", lc.a1},
           {"a2", lc.a2},
           {"a3", lc.a3}};
    if (measure_name.rfind("level:", 0) == 0) {
        arw::EnergyLevel level = arw::enumerate_level(std::stoll(measure_name.substr(6)));
        j["F"] = arw::F_functional(curve, level);
    }
    emit(j, out);
    return 0;
}

int cmd_simulate(long long n, const CurveOptions& copts, std::uint64_t trials,
                 std::uint64_t seed, double resolution, const std::string& out,
                 const std::string& hist, const std::string& svg, long long dump_sample) {
    arw::EnergyLevel level = arw::enumerate_level(n);
    arw::UnitSpeedCurve curve = arw::build_unit_speed(copts.spec());

    if (dump_sample >= 0) {
        arw::WaveSample s = arw::sample_coefficients(
            level, seed, static_cast<std::uint64_t>(dump_sample));
        json coeffs = json::array();
        for (std::size_t j = 0; j < s.coeffs.size(); ++j)
            coeffs.push_back({{"lambda", {level.half_points[j].x, level.half_points[j].y}},
                              {"re", s.coeffs[j].real()},
                              {"im", s.coeffs[j].imag()}});
        emit(json{{"n", n}, {"seed", seed}, {"trial", dump_sample}, {"coeffs", coeffs}}, "");
        return 0;
    }

    arw::MonteCarloSummary s = arw::run_campaign(level, curve, trials, seed, resolution);
    json j{{"curve", arw::curve_identifier(copts.spec())},
           {"n", s.n},
           {"trials", s.trials},
           {"seed", s.seed},
           {"resolution", s.resolution},
           {"empirical_mean", s.empirical_mean},
           {"empirical_variance", s.empirical_variance},
           {"theoretical_mean", s.theoretical_mean},
           {"theoretical_variance", s.theoretical_variance},
           {"regime", s.regime == arw::Regime::Static ? "static" : "generic"},
           {"ks_normal", s.ks_normal},
           {"ks_static_circle", s.ks_static_circle},
           {"ks_limit_law", s.ks_limit_law},
           {"flag_rate", s.flag_rate},
           {"even_fraction", s.even_fraction},
           {"counts", s.counts}};
    emit(j, out);
    if (!hist.empty()) arw::write_histogram_csv(hist, s.standardized);
    if (!svg.empty()) arw::write_histogram_svg(svg, s.standardized);
    return 0;
}

int cmd_chaos(long long n, const CurveOptions& copts, std::uint64_t trials,
              std::uint64_t seed, const std::string& limit, long long draws,
              const std::string& csv, const std::string& out, bool residual,
              double resolution) {
    arw::EnergyLevel level = arw::enumerate_level(n);
    arw::UnitSpeedCurve curve = arw::build_unit_speed(copts.spec());
    arw::ChaosProjector projector(level, curve);
    std::unique_ptr<arw::RestrictedGrid> grid;
    if (residual) grid = std::make_unique<arw::RestrictedGrid>(level, curve, resolution);

    arw::KahanSum s2a, q2a, s2t, q2t, s4, q4, cross, sz, qz, sr, qr;
    double max_res = 0.0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        arw::WaveSample sample = arw::sample_coefficients(level, seed, trial);
        arw::Projection2 p2 = projector.project_2(sample);
        arw::Projection4 p4 = projector.project_4(sample);
        arw::WFunctionals wf = projector.W_functionals(sample);
        double z2 = p2.z2a + p2.z2b;
        s2a.add(p2.z2a);
        q2a.add(p2.z2a * p2.z2a);
        s2t.add(z2);
        q2t.add(z2 * z2);
        s4.add(p4.z4a);
        q4.add(p4.z4a * p4.z4a);
        cross.add(z2 * p4.z4a);
        max_res = std::max(max_res, std::abs(wf.identity_residual));
        if (residual) {
            double count = static_cast<double>(
                arw::count_zeros(grid->realize(sample), 1e-10).count);
            double rem = count - projector.z0() - z2 - p4.z4a;
            sz.add(count);
            qz.add(count * count);
            sr.add(rem);
            qr.add(rem * rem);
        }
    }
    double m = static_cast<double>(trials);
    double mean2a = s2a.value() / m, mean2t = s2t.value() / m, mean4 = s4.value() / m;

    arw::SpectralMeasure mu = arw::spectral_measure(level);
    json j{{"n", n},
           {"curve", arw::curve_identifier(copts.spec())},
           {"trials", trials},
           {"z0", projector.z0()},
           {"var_z2a_mc", q2a.value() / m - mean2a * mean2a},
           {"var_z2a_pred", projector.predicted_var_z2a()},
           {"var_z2_total_mc", q2t.value() / m - mean2t * mean2t},
           {"var_z4a_mc", q4.value() / m - mean4 * mean4},
           {"var_z4a_pred", projector.predicted_var_z4a()},
           {"cov_z2_z4a", cross.value() / m - mean2t * mean4},
           {"max_identity_residual", max_res},
           {"B", projector.B_mu()},
           {"A", projector.A_mu()},
           {"F", projector.F_mu()}};

    if (residual) {
        double mz = sz.value() / m, mr = sr.value() / m;
        double var_z = qz.value() / m - mz * mz;
        double var_rem = qr.value() / m - mr * mr;
        j["var_counts"] = var_z;
        j["var_partial_sum_residual"] = var_rem;
        j["partial_sum_residual_ratio"] = var_rem / var_z;
    }

    if (draws > 0) {
        std::vector<double> samples(static_cast<std::size_t>(draws));
        arw::GaussianStream rng(seed ^ 0x6c696d6974ULL, 0);
        if (limit == "M") {
            arw::MLawSpec law = arw::m_law_reconciled(curve, mu);
            for (auto& v : samples) v = arw::sample_limit_M(law, rng);
        } else if (limit == "I") {
            arw::LimitLawSamplerI sampler(curve, mu);
            for (auto& v : samples) v = sampler.draw(rng);
            arw::MLawSpec law = arw::m_law_reconciled(curve, mu);
            arw::GaussianStream rng_m(seed ^ 0x4d726f757465ULL, 0);
            std::vector<double> m_draws(samples.size());
            for (auto& v : m_draws) v = arw::sample_limit_M(law, rng_m);
            j["ks_M_vs_I"] = arw::ks_distance(m_draws, samples);
        } else if (limit == "circle") {
            for (auto& v : samples) {
                double z1 = rng.next(), z2 = rng.next();
                v = 1.0 - 0.5 * (z1 * z1 + z2 * z2);
            }
        } else {
            throw arw::ConfigInvalid("limit must be M, I or circle");
        }
        arw::KahanSum sm, sq;
        for (double v : samples) {
            sm.add(v);
            sq.add(v * v);
        }
        double mean = sm.value() / draws;
        j["limit_route"] = limit;
        j["limit_draws"] = draws;
        j["limit_mean"] = mean;
        j["limit_variance"] = sq.value() / draws - mean * mean;
        j["ks_vs_circle_law"] =
            arw::ks_distance(samples, arw::ReferenceLaw::StaticCircle);
        if (!csv.empty()) {
            std::ostringstream os;
            os << "sample\n";
            for (double v : samples) os << v << "\n";
            arw::write_file(csv, os.str());
        }
    }
    emit(j, out);
    return 0;
}

int cmd_kacrice(long long n, const CurveOptions& copts, double c0,
                const std::string& orders_str, const std::string& out) {
    arw::EnergyLevel level = arw::enumerate_level(n);
    arw::UnitSpeedCurve curve = arw::build_unit_speed(copts.spec());

    std::vector<int> orders;
    {
        std::istringstream is(orders_str);
        std::string tok;
        while (std::getline(is, tok, ',')) orders.push_back(std::stoi(tok));
    }

    arw::VarianceNumeric vn = arw::variance_numeric(level, curve, c0);
    json moments = json::array();
    for (const auto& row : arw::moment_integrals(level, curve, orders))
        moments.push_back({{"name", row.name},
                           {"value", row.value},
                           {"prediction", row.prediction},
                           {"ratio", row.ratio}});

    json j{{"n", n},
           {"curve", arw::curve_identifier(copts.spec())},
           {"c0", vn.c0_used},
           {"K1", arw::K1(n)},
           {"variance_numeric", vn.variance},
           {"integral_K2", vn.integral_K2},
           {"singular_area_ratio", vn.singular_area_ratio},
           {"squares_per_side", vn.squares_per_side},
           {"band_halfwidth", vn.band_halfwidth},
           {"band_delta", vn.band_delta},
           {"moments", moments}};
    if (arw::is_static(curve))
        j["variance_approx_static"] = arw::variance_approx_static(level, curve, c0);
    emit(j, out);
    return 0;
}

int cmd_run(const std::string& config_path) {
    arw::ExperimentConfig cfg = arw::load_config(config_path);
    arw::RunManifest manifest = arw::run_experiment(cfg);
    std::cout << "config hash " << manifest.config_hash << ", " << manifest.levels.size()
              << " level(s), " << (manifest.all_passed ? "all checks passed" : "CHECK FAILED")
              << "\n";
    for (const auto& rep : manifest.levels)
        for (const auto& chk : rep.checks)
            std::cout << "  n=" << rep.n << " " << chk.name << ": "
                      << (chk.passed ? "pass" : "FAIL") << " (value " << chk.value
                      << ", bound " << chk.bound << ")\n";
    if (cfg.report_path.empty())
        std::cout << arw::manifest_to_json(manifest);
    return manifest.all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nodal intersection statistics of arithmetic random waves"};
    app.require_subcommand(1);

    // lattice
    auto* lat = app.add_subcommand("lattice", "lattice points, spectral measure, diagnostics");
    long long lat_n = 25;
    double lat_delta = 0.02;
    int lat_order = 4;
    std::string lat_out;
    lat->add_option("--n", lat_n, "energy level")->required();
    lat->add_option("--delta", lat_delta, "separation exponent offset");
    lat->add_option("--order", lat_order, "correlation order (4 or 6)");
    lat->add_option("--out", lat_out, "output JSON path (stdout otherwise)");

    // curve
    auto* cur = app.add_subcommand("curve", "curve functionals");
    CurveOptions cur_copts;
    cur_copts.attach(cur);
    std::string cur_measure = "uniform", cur_out;
    cur->add_option("--measure", cur_measure, "uniform | cilleruelo | tilted | level:n");
    cur->add_option("--out", cur_out, "output JSON path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo crossing campaign");
    CurveOptions sim_copts;
    sim_copts.attach(sim);
    long long sim_n = 25;
    std::uint64_t sim_trials = 1000, sim_seed = 1;
    double sim_res = 20.0;
    long long sim_dump = -1;
    std::string sim_out, sim_hist, sim_svg;
    sim->add_option("--n", sim_n, "energy level")->required();
    sim->add_option("--trials", sim_trials, "number of trials");
    sim->add_option("--seed", sim_seed, "campaign seed");
    sim->add_option("--resolution", sim_res, "samples per wavelength");
    sim->add_option("--out", sim_out, "report JSON path");
    sim->add_option("--hist", sim_hist, "histogram CSV path");
    sim->add_option("--svg", sim_svg, "histogram SVG path");
    sim->add_option("--dump-sample", sim_dump, "dump one trial's coefficients and exit");

    // chaos
    auto* cha = app.add_subcommand("chaos", "chaos projections and limit laws");
    CurveOptions cha_copts;
    cha_copts.attach(cha);
    long long cha_n = 25, cha_draws = 0;
    std::uint64_t cha_trials = 1000, cha_seed = 1;
    std::string cha_limit = "I", cha_csv, cha_out;
    cha->add_option("--n", cha_n, "energy level")->required();
    cha->add_option("--trials", cha_trials, "projection trials");
    cha->add_option("--seed", cha_seed, "seed");
    cha->add_option("--limit", cha_limit, "limit-law route: M | I | circle");
    cha->add_option("--draws", cha_draws, "limit-law draws (0 = skip)");
    cha->add_option("--csv", cha_csv, "CSV path for limit-law samples");
    cha->add_option("--out", cha_out, "output JSON path");
    bool cha_residual = false;
    double cha_resolution = 20.0;
    cha->add_flag("--residual", cha_residual,
                  "also count zeros per trial and report the partial-sum residual");
    cha->add_option("--resolution", cha_resolution, "samples per wavelength (residual mode)");

    // kacrice
    auto* kac = app.add_subcommand("kacrice", "Kac-Rice integrals and moment table");
    CurveOptions kac_copts;
    kac_copts.attach(kac);
    long long kac_n = 65;
    double kac_c0 = 0.5;
    std::string kac_orders = "2,4,6", kac_out;
    kac->add_option("--n", kac_n, "energy level")->required();
    kac->add_option("--c0", kac_c0, "square partition constant");
    kac->add_option("--orders", kac_orders, "moment orders, comma separated");
    kac->add_option("--out", kac_out, "output JSON path");

    // run
    auto* run = app.add_subcommand("run", "execute a configured experiment");
    std::string run_config;
    run->add_option("--config", run_config, "experiment config file")->required();

    // report
    auto* rep = app.add_subcommand("report", "consolidate manifests into a trend table");
    std::vector<std::string> rep_paths;
    std::string rep_csv;
    rep->add_option("manifests", rep_paths, "manifest JSON paths")->required();
    rep->add_option("--csv", rep_csv, "CSV output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (lat->parsed()) return cmd_lattice(lat_n, lat_delta, lat_order, lat_out);
        if (cur->parsed()) return cmd_curve(cur_copts, cur_measure, cur_out);
        if (sim->parsed())
            return cmd_simulate(sim_n, sim_copts, sim_trials, sim_seed, sim_res, sim_out,
                                sim_hist, sim_svg, sim_dump);
        if (cha->parsed())
            return cmd_chaos(cha_n, cha_copts, cha_trials, cha_seed, cha_limit, cha_draws,
                             cha_csv, cha_out, cha_residual, cha_resolution);
        if (kac->parsed())
            return cmd_kacrice(kac_n, kac_copts, kac_c0, kac_orders, kac_out);
        if (run->parsed()) return cmd_run(run_config);
        if (rep->parsed()) {
            std::cout << arw::report_table(rep_paths, rep_csv);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
