#include "arw/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "arw/chaos.hpp"
#include "arw/field.hpp"

namespace arw {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    auto e = s.find_last_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid("bad numeric value for '" + key + "': " + s);
    }
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw ConfigInvalid("bad boolean value for '" + key + "': " + s);
}

using Section = std::map<std::string, std::string>;

std::map<std::string, Section> parse_sections(const std::string& text) {
    std::map<std::string, Section> sections;
    std::string current = "experiment";
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            current = trim(line.substr(1, line.size() - 2));
            sections[current];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("expected key = value, got: " + line);
        sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return sections;
}

}  // namespace

CurveSpec curve_from_kv(const Section& kv) {
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };

    std::string family = get("family").value_or("circle");
    double cx = 0.5, cy = 0.5;
    if (auto c = get("center")) {
        auto parts = split_ws(*c);
        if (parts.size() != 2) throw ConfigInvalid("center needs two coordinates");
        cx = to_double(parts[0], "center");
        cy = to_double(parts[1], "center");
    }

    CurveSpec spec;
    if (family == "circle") {
        spec = CurveSpec::circle(cx, cy, to_double(get("radius").value_or("0.2"), "radius"));
    } else if (family == "ellipse") {
        spec = CurveSpec::ellipse(cx, cy, to_double(get("a").value_or("0.25"), "a"),
                                  to_double(get("b").value_or("0.15"), "b"),
                                  to_double(get("rotation").value_or("0"), "rotation"));
    } else if (family == "flower") {
        spec = CurveSpec::flower(cx, cy, to_double(get("r0").value_or("0.2"), "r0"),
                                 to_double(get("eps").value_or("0.05"), "eps"),
                                 static_cast<int>(to_double(get("k").value_or("3"), "k")),
                                 to_double(get("phase").value_or("0"), "phase"));
    } else if (family == "arc") {
        spec = CurveSpec::arc(cx, cy, to_double(get("radius").value_or("0.2"), "radius"),
                              to_double(get("angle0").value_or("0"), "angle0"),
                              to_double(get("angle1").value_or("3.141592653589793"), "angle1"));
    } else {
        throw ConfigInvalid("unknown curve family: " + family);
    }
    if (auto r = get("rotation"); r && family != "ellipse")
        spec.rotation = to_double(*r, "rotation");
    return spec;
}

ExperimentConfig parse_config(const std::string& text) {
    auto sections = parse_sections(text);
    ExperimentConfig cfg;

    const Section& exp = sections["experiment"];
    for (const auto& [key, value] : exp) {
        if (key == "levels") {
            for (const auto& tok : split_ws(value))
                cfg.levels.push_back(static_cast<long long>(to_double(tok, "levels")));
        } else if (key == "trials") {
            cfg.trials = static_cast<std::uint64_t>(to_double(value, key));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_double(value, key));
        } else if (key == "resolution") {
            cfg.resolution = to_double(value, key);
        } else if (key == "regime") {
            if (value != "auto" && value != "static" && value != "generic")
                throw ConfigInvalid("regime must be auto, static or generic");
            cfg.regime = value;
        } else if (key == "limit_route") {
            if (value != "I" && value != "M" && value != "circle")
                throw ConfigInvalid("limit_route must be I, M or circle");
            cfg.limit_route = value;
        } else if (key == "kacrice") {
            cfg.run_kacrice = to_bool(value, key);
        } else if (key == "chaos") {
            cfg.run_chaos = to_bool(value, key);
        } else {
            throw ConfigInvalid("unknown experiment key: " + key);
        }
    }
    if (cfg.levels.empty()) throw ConfigInvalid("no levels configured");
    for (long long n : cfg.levels)
        if (!is_representable(n))
            throw ConfigInvalid("level " + std::to_string(n) +
                                " is not a sum of two squares");
    if (cfg.trials < 2) throw ConfigInvalid("trials must be at least 2");
    if (cfg.resolution < 8.0) throw ConfigInvalid("resolution must be at least 8");

    if (auto it = sections.find("curve"); it != sections.end())
        cfg.curve = curve_from_kv(it->second);

    if (auto it = sections.find("output"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "report")
                cfg.report_path = value;
            else if (key == "hist")
                cfg.hist_path = value;
            else if (key == "svg")
                cfg.svg_path = value;
            else
                throw ConfigInvalid("unknown output key: " + key);
        }
    }

    if (auto it = sections.find("checks"); it != sections.end()) {
        for (const auto& [key, value] : it->second) {
            if (key == "mean_law")
                cfg.check_mean_law = to_bool(value, key);
            else if (key == "flag_rate")
                cfg.check_flag_rate = to_bool(value, key);
            else if (key == "parity")
                cfg.check_parity = to_bool(value, key);
            else if (key == "variance_band") {
                auto parts = split_ws(value);
                if (parts.size() != 2) throw ConfigInvalid("variance_band needs two bounds");
                cfg.variance_band_lo = to_double(parts[0], key);
                cfg.variance_band_hi = to_double(parts[1], key);
            } else {
                throw ConfigInvalid("unknown checks key: " + key);
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    os << "levels=";
    for (long long n : levels) os << n << ",";
    os << ";curve=" << curve_identifier(curve) << ";trials=" << trials << ";seed=" << seed
       << ";resolution=" << resolution << ";regime=" << regime << ";route=" << limit_route
       << ";kacrice=" << run_kacrice << ";chaos=" << run_chaos
       << ";checks=" << check_mean_law << check_flag_rate << check_parity << ","
       << variance_band_lo << "," << variance_band_hi;
    return os.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << content;
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

namespace {

json summary_to_json(const MonteCarloSummary& s) {
    return json{{"n", s.n},
                {"curve_id", s.curve_id},
                {"trials", s.trials},
                {"seed", s.seed},
                {"resolution", s.resolution},
                {"counts", s.counts},
                {"empirical_mean", s.empirical_mean},
                {"empirical_variance", s.empirical_variance},
                {"theoretical_mean", s.theoretical_mean},
                {"theoretical_variance", s.theoretical_variance},
                {"regime", s.regime == Regime::Static ? "static" : "generic"},
                {"ks_normal", s.ks_normal},
                {"ks_static_circle", s.ks_static_circle},
                {"ks_limit_law", s.ks_limit_law},
                {"flag_rate", s.flag_rate},
                {"even_fraction", s.even_fraction},
                {"max_refinement_depth", s.max_refinement_depth}};
}

MonteCarloSummary summary_from_json(const json& j) {
    MonteCarloSummary s;
    s.n = j.at("n").get<long long>();
    s.curve_id = j.value("curve_id", std::string{});
    s.trials = j.at("trials").get<std::uint64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.resolution = j.at("resolution").get<double>();
    s.counts = j.at("counts").get<std::vector<long long>>();
    s.empirical_mean = j.at("empirical_mean").get<double>();
    s.empirical_variance = j.at("empirical_variance").get<double>();
    s.theoretical_mean = j.at("theoretical_mean").get<double>();
    s.theoretical_variance = j.at("theoretical_variance").get<double>();
    s.regime = j.at("regime").get<std::string>() == "static" ? Regime::Static
                                                             : Regime::Generic;
    s.ks_normal = j.at("ks_normal").get<double>();
    s.ks_static_circle = j.at("ks_static_circle").get<double>();
    s.ks_limit_law = j.at("ks_limit_law").is_null()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : j.at("ks_limit_law").get<double>();
    s.flag_rate = j.at("flag_rate").get<double>();
    s.even_fraction = j.at("even_fraction").get<double>();
    s.max_refinement_depth = j.at("max_refinement_depth").get<int>();
    return s;
}

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    auto start = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config_hash = fnv1a_hex(cfg.canonical_text());
    manifest.code_version = kCodeVersion;
    manifest.created_utc = utc_now();
    manifest.curve_id = curve_identifier(cfg.curve);

    UnitSpeedCurve curve = build_unit_speed(cfg.curve);
    manifest.curve = curve_functionals(curve);

    const bool curve_static = manifest.curve.is_static;
    if (cfg.regime == "static" && !curve_static)
        throw ConfigInvalid("regime=static configured for a non-static curve");
    if (cfg.regime == "generic" && curve_static)
        throw ConfigInvalid("regime=generic configured for a static curve");

    for (long long n : cfg.levels) {
        LevelReport rep;
        rep.n = n;
        EnergyLevel level = enumerate_level(n);
        rep.N = level.count;
        SeparationStats sep = separation_stats(level, 0.02);
        rep.min_sep = sep.min_sep;
        rep.delta_separated = sep.is_delta_separated;
        rep.mu_hat4 = mu_hat(spectral_measure(level), 4).real();

        rep.campaign = run_campaign(level, curve, cfg.trials, cfg.seed, cfg.resolution);

        if (cfg.run_chaos) {
            ChaosProjector projector(level, curve);
            KahanSum s2, q2, s4, q4;
            double max_res = 0.0;
            std::uint64_t m = cfg.trials;
            for (std::uint64_t trial = 0; trial < m; ++trial) {
                WaveSample sample = sample_coefficients(level, cfg.seed, trial);
                Projection2 p2 = projector.project_2(sample);
                Projection4 p4 = projector.project_4(sample);
                s2.add(p2.z2a);
                q2.add(p2.z2a * p2.z2a);
                s4.add(p4.z4a);
                q4.add(p4.z4a * p4.z4a);
                if (curve_static) {
                    WFunctionals wf = projector.W_functionals(sample);
                    max_res = std::max(max_res, std::abs(wf.identity_residual));
                }
            }
            double mm = static_cast<double>(m);
            double mean2 = s2.value() / mm, mean4 = s4.value() / mm;
            rep.var_z2a_mc = q2.value() / mm - mean2 * mean2;
            rep.var_z4a_mc = q4.value() / mm - mean4 * mean4;
            rep.var_z2a_pred = projector.predicted_var_z2a();
            rep.var_z4a_pred = projector.predicted_var_z4a();
            rep.max_identity_residual = max_res;
        }

        // configured acceptance checks
        const MonteCarloSummary& c = rep.campaign;
        if (cfg.check_mean_law) {
            double se = std::sqrt(c.empirical_variance / static_cast<double>(c.trials));
            CheckResult chk;
            chk.name = "mean_law";
            chk.value = std::abs(c.empirical_mean - c.theoretical_mean);
            chk.bound = 3.0 * se;
            chk.passed = chk.value <= chk.bound;
            chk.detail = "empirical mean vs sqrt(2n) L within 3 standard errors";
            rep.checks.push_back(chk);
        }
        if (cfg.check_flag_rate) {
            CheckResult chk;
            chk.name = "flag_rate";
            chk.value = c.flag_rate;
            chk.bound = 0.001;
            chk.passed = chk.value <= chk.bound;
            chk.detail = "unresolved-tangency rate";
            rep.checks.push_back(chk);
        }
        if (cfg.check_parity && curve.closed()) {
            CheckResult chk;
            chk.name = "parity";
            chk.value = c.even_fraction;
            chk.bound = 0.999;
            chk.passed = chk.value >= chk.bound;
            chk.detail = "even counts on a closed curve";
            rep.checks.push_back(chk);
        }
        if (cfg.variance_band_hi > 0.0) {
            CheckResult chk;
            chk.name = "variance_band";
            chk.value = c.empirical_variance / c.theoretical_variance;
            chk.bound = cfg.variance_band_hi;
            chk.passed =
                chk.value >= cfg.variance_band_lo && chk.value <= cfg.variance_band_hi;
            chk.detail = "empirical/predicted variance ratio";
            rep.checks.push_back(chk);
        }
        for (const auto& chk : rep.checks) manifest.all_passed &= chk.passed;
        manifest.levels.push_back(std::move(rep));
    }

    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!cfg.report_path.empty()) write_file(cfg.report_path, manifest_to_json(manifest));
    if (!cfg.hist_path.empty() && !manifest.levels.empty())
        write_histogram_csv(cfg.hist_path, manifest.levels.back().campaign.standardized);
    if (!cfg.svg_path.empty() && !manifest.levels.empty())
        write_histogram_svg(cfg.svg_path, manifest.levels.back().campaign.standardized);
    return manifest;
}

std::string manifest_to_json(const RunManifest& m) {
    json levels = json::array();
    for (const auto& rep : m.levels) {
        json checks = json::array();
        for (const auto& chk : rep.checks)
            checks.push_back(json{{"name", chk.name},
                                  {"passed", chk.passed},
                                  {"value", chk.value},
                                  {"bound", chk.bound},
                                  {"detail", chk.detail}});
        levels.push_back(json{{"n", rep.n},
                              {"N", rep.N},
                              {"min_sep", rep.min_sep},
                              {"delta_separated", rep.delta_separated},
                              {"mu_hat4", rep.mu_hat4},
                              {"campaign", summary_to_json(rep.campaign)},
                              {"var_z2a_mc", rep.var_z2a_mc},
                              {"var_z2a_pred", rep.var_z2a_pred},
                              {"var_z4a_mc", rep.var_z4a_mc},
                              {"var_z4a_pred", rep.var_z4a_pred},
                              {"max_identity_residual", rep.max_identity_residual},
                              {"checks", checks}});
    }
    json j{{"config_hash", m.config_hash},
           {"code_version", m.code_version},
           {"created_utc", m.created_utc},
           {"duration_seconds", m.duration_seconds},
           {"curve_id", m.curve_id},
           {"curve",
            {{"length", m.curve.length},
             {"I_re", m.curve.I.real()},
             {"I_im", m.curve.I.imag()},
             {"is_static", m.curve.is_static},
             {"B_uniform", m.curve.B_uniform},
             {"A_uniform", m.curve.A_uniform},
             {"int_f2", m.curve.int_f2},
             {"int_fg", m.curve.int_fg},
             {"int_g2", m.curve.int_g2}}},
           {"levels", levels},
           {"all_passed", m.all_passed}};
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    json j = json::parse(text);
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.code_version = j.at("code_version").get<std::string>();
    m.created_utc = j.at("created_utc").get<std::string>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    m.curve_id = j.at("curve_id").get<std::string>();
    const json& c = j.at("curve");
    m.curve.length = c.at("length").get<double>();
    m.curve.I = {c.at("I_re").get<double>(), c.at("I_im").get<double>()};
    m.curve.is_static = c.at("is_static").get<bool>();
    m.curve.B_uniform = c.at("B_uniform").get<double>();
    m.curve.A_uniform = c.at("A_uniform").get<double>();
    m.curve.int_f2 = c.at("int_f2").get<double>();
    m.curve.int_fg = c.at("int_fg").get<double>();
    m.curve.int_g2 = c.at("int_g2").get<double>();
    m.all_passed = j.at("all_passed").get<bool>();
    for (const json& lj : j.at("levels")) {
        LevelReport rep;
        rep.n = lj.at("n").get<long long>();
        rep.N = lj.at("N").get<int>();
        rep.min_sep = lj.at("min_sep").get<double>();
        rep.delta_separated = lj.at("delta_separated").get<bool>();
        rep.mu_hat4 = lj.at("mu_hat4").get<double>();
        rep.campaign = summary_from_json(lj.at("campaign"));
        rep.var_z2a_mc = lj.at("var_z2a_mc").get<double>();
        rep.var_z2a_pred = lj.at("var_z2a_pred").get<double>();
        rep.var_z4a_mc = lj.at("var_z4a_mc").get<double>();
        rep.var_z4a_pred = lj.at("var_z4a_pred").get<double>();
        rep.max_identity_residual = lj.at("max_identity_residual").get<double>();
        for (const json& cj : lj.at("checks")) {
            CheckResult chk;
            chk.name = cj.at("name").get<std::string>();
            chk.passed = cj.at("passed").get<bool>();
            chk.value = cj.at("value").get<double>();
            chk.bound = cj.at("bound").get<double>();
            chk.detail = cj.at("detail").get<std::string>();
            rep.checks.push_back(chk);
        }
        m.levels.push_back(std::move(rep));
    }
    return m;
}

std::string report_table(const std::vector<std::string>& manifest_paths,
                         const std::string& csv_path) {
    if (manifest_paths.empty()) throw ConfigInvalid("report: need at least one manifest");
    std::ostringstream text, csv;
    csv << "n,N,curve,trials,mean,mean_pred,variance,variance_pred,variance_ratio,"
           "ks_normal,ks_static_circle,ks_limit_law,flag_rate,all_passed\n";
    text << "  n     N  curve                      var      var_pred   ratio    KS(N01)  "
            "KS(circle)  KS(limit)\n";
    for (const auto& path : manifest_paths) {
        RunManifest m = manifest_from_json(read_file(path));
        for (const auto& rep : m.levels) {
            const auto& c = rep.campaign;
            double ratio = c.theoretical_variance != 0.0
                               ? c.empirical_variance / c.theoretical_variance
                               : std::numeric_limits<double>::quiet_NaN();
            csv << rep.n << ',' << rep.N << ',' << m.curve_id << ',' << c.trials << ','
                << c.empirical_mean << ',' << c.theoretical_mean << ','
                << c.empirical_variance << ',' << c.theoretical_variance << ',' << ratio
                << ',' << c.ks_normal << ',' << c.ks_static_circle << ',' << c.ks_limit_law
                << ',' << c.flag_rate << ',' << (m.all_passed ? 1 : 0) << "\n";
            char line[256];
            std::snprintf(line, sizeof(line),
                          "%5lld %5d  %-24s %9.4f %9.4f %8.2f %9.4f %9.4f %9.4f\n",
                          rep.n, rep.N, m.curve_id.substr(0, 24).c_str(),
                          c.empirical_variance, c.theoretical_variance, ratio, c.ks_normal,
                          c.ks_static_circle, c.ks_limit_law);
            text << line;
        }
    }
    if (!csv_path.empty()) write_file(csv_path, csv.str());
    return text.str();
}

namespace {

struct Histogram {
    double lo = 0.0, hi = 0.0, width = 0.0;
    std::vector<double> density;
    std::vector<long long> counts;
};

Histogram make_histogram(const std::vector<double>& samples, int bins = 61) {
    Histogram h;
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    h.lo = std::min(-4.0, *mn);
    h.hi = std::max(4.0, *mx);
    h.width = (h.hi - h.lo) / bins;
    h.counts.assign(bins, 0);
    for (double v : samples) {
        int b = std::min(bins - 1, std::max(0, static_cast<int>((v - h.lo) / h.width)));
        ++h.counts[b];
    }
    h.density.resize(bins);
    for (int b = 0; b < bins; ++b)
        h.density[b] =
            static_cast<double>(h.counts[b]) / (samples.size() * h.width);
    return h;
}

double normal_density(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

double static_circle_density(double x) {
    return x <= 1.0 ? std::exp(x - 1.0) : 0.0;  // density of 1 - Exp(1)
}

}  // namespace

void write_histogram_csv(const std::string& path, const std::vector<double>& standardized) {
    Histogram h = make_histogram(standardized);
    std::ostringstream os;
    os << "bin_center,count,density,normal_density,static_circle_density\n";
    for (std::size_t b = 0; b < h.density.size(); ++b) {
        double x = h.lo + (b + 0.5) * h.width;
        os << x << ',' << h.counts[b] << ',' << h.density[b] << ',' << normal_density(x)
           << ',' << static_circle_density(x) << "\n";
    }
    write_file(path, os.str());
}

void write_histogram_svg(const std::string& path, const std::vector<double>& standardized) {
    Histogram h = make_histogram(standardized);
    const int W = 720, H = 420, mL = 50, mB = 40, mT = 20, mR = 20;
    double dmax = 1e-9;
    for (double d : h.density) dmax = std::max(dmax, d);
    for (std::size_t b = 0; b < h.density.size(); ++b) {
        double x = h.lo + (b + 0.5) * h.width;
        dmax = std::max({dmax, normal_density(x), static_circle_density(x)});
    }
    auto X = [&](double v) { return mL + (v - h.lo) / (h.hi - h.lo) * (W - mL - mR); };
    auto Y = [&](double d) { return H - mB - d / dmax * (H - mT - mB); };

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
       << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    for (std::size_t b = 0; b < h.density.size(); ++b) {
        double x0 = h.lo + b * h.width;
        os << "<rect x='" << X(x0) << "' y='" << Y(h.density[b]) << "' width='"
           << (X(x0 + h.width) - X(x0)) << "' height='" << (Y(0) - Y(h.density[b]))
           << "' fill='#7799cc' stroke='none'/>\n";
    }
    auto polyline = [&](double (*f)(double), const char* color) {
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (int i = 0; i <= 200; ++i) {
            double x = h.lo + (h.hi - h.lo) * i / 200.0;
            os << X(x) << ',' << Y(f(x)) << ' ';
        }
        os << "'/>\n";
    };
    polyline(&normal_density, "#cc3333");
    polyline(&static_circle_density, "#33aa33");
    os << "<line x1='" << mL << "' y1='" << (H - mB) << "' x2='" << (W - mR) << "' y2='"
       << (H - mB) << "' stroke='black'/>\n";
    for (int v = static_cast<int>(std::ceil(h.lo)); v <= static_cast<int>(h.hi); ++v) {
        os << "<line x1='" << X(v) << "' y1='" << (H - mB) << "' x2='" << X(v) << "' y2='"
           << (H - mB + 5) << "' stroke='black'/>\n<text x='" << X(v) << "' y='"
           << (H - mB + 18) << "' font-size='11' text-anchor='middle'>" << v << "</text>\n";
    }
    os << "<text x='" << (W / 2) << "' y='" << (H - 8)
       << "' font-size='12' text-anchor='middle'>standardized nodal intersection count"
          "</text>\n</svg>\n";
    write_file(path, os.str());
}

}  // namespace arw
