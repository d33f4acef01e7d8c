#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "arw/experiment.hpp"

using namespace arw;

namespace {

const char* kConfigText = R"cfg(
# smoke configuration
[experiment]
levels = 25
trials = 300
seed = 7
resolution = 20
regime = auto
limit_route = I

[curve]
family = circle
center = 0.5 0.5
radius = 0.2

[checks]
mean_law = on
flag_rate = on
parity = on
)cfg";

}  // namespace

TEST_CASE("config parsing") {
    ExperimentConfig cfg = parse_config(kConfigText);
    CHECK(cfg.levels == std::vector<long long>{25});
    CHECK(cfg.trials == 300);
    CHECK(cfg.seed == 7);
    CHECK(cfg.resolution == 20.0);
    CHECK(cfg.curve.family == CurveFamily::Circle);
    CHECK(cfg.curve.a == doctest::Approx(0.2));

    CHECK_THROWS_AS(parse_config("[experiment]\nlevels = 3\n"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config("[experiment]\nlevels = 25\nbogus = 1\n"), ConfigInvalid);
    CHECK_THROWS_AS(parse_config("[experiment]\ntrials = 10\n"), ConfigInvalid);  // no levels
    CHECK_THROWS_AS(parse_config("[experiment]\nlevels = 25\nregime = nonsense\n"),
                    ConfigInvalid);
}

TEST_CASE("experiment run: checks, manifest round trip, determinism") {
    ExperimentConfig cfg = parse_config(kConfigText);
    cfg.report_path = "test_out/report.json";
    cfg.hist_path = "test_out/hist.csv";
    cfg.svg_path = "test_out/hist.svg";

    RunManifest m1 = run_experiment(cfg);
    CHECK(m1.all_passed);
    CHECK(m1.levels.size() == 1);
    CHECK(m1.levels[0].N == 12);
    CHECK(m1.curve.is_static);
    for (const auto& chk : m1.levels[0].checks) CHECK(chk.passed);

    // artifacts exist
    CHECK(std::filesystem::exists("test_out/report.json"));
    CHECK(std::filesystem::exists("test_out/hist.csv"));
    CHECK(std::filesystem::exists("test_out/hist.svg"));

    // manifest JSON round trip
    RunManifest back = manifest_from_json(read_file("test_out/report.json"));
    CHECK(back.config_hash == m1.config_hash);
    CHECK(back.levels[0].campaign.counts == m1.levels[0].campaign.counts);

    // determinism: identical results modulo timestamps
    RunManifest m2 = run_experiment(cfg);
    CHECK(m2.config_hash == m1.config_hash);
    CHECK(m2.levels[0].campaign.counts == m1.levels[0].campaign.counts);
    m2.created_utc = m1.created_utc;
    m2.duration_seconds = m1.duration_seconds;
    CHECK(manifest_to_json(m2) == manifest_to_json(m1));

    // regime gate
    ExperimentConfig bad = cfg;
    bad.regime = "generic";  // circle is static
    CHECK_THROWS_AS(run_experiment(bad), ConfigInvalid);
}

TEST_CASE("report table") {
    ExperimentConfig cfg = parse_config(kConfigText);
    cfg.trials = 200;
    cfg.report_path = "test_out/m1.json";
    run_experiment(cfg);

    std::string table = report_table({"test_out/m1.json"}, "test_out/report.csv");
    CHECK(table.find("25") != std::string::npos);
    CHECK(std::filesystem::exists("test_out/report.csv"));
    std::string csv = read_file("test_out/report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row

    CHECK_THROWS_AS(report_table({}), ConfigInvalid);
}
