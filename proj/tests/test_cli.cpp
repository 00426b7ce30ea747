#include "groupnoise/errors.hpp"
#include "groupnoise/experiment.hpp"
#include "groupnoise/report.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace groupnoise;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " + GROUPNOISE_BINARY + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_temp(const std::string& name, const std::string& text) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config("# comment\nkind = exact-l1, entropy-ns\ngroup = D_inf x D_inf\nrho = 0.1, 0.2\n"
                                  "n = 4, 8   # trailing\nreps = 300\nseed = 42\nmeasure = lazy\n");
    CHECK(cfg.kinds == std::vector<ExperimentKind>{ExperimentKind::ExactL1, ExperimentKind::EntropyNs});
    CHECK(cfg.group == "D_inf x D_inf");
    CHECK(cfg.rho == std::vector<double>{0.1, 0.2});
    CHECK(cfg.n == std::vector<int>{4, 8});
    CHECK(cfg.reps == 300);
    CHECK(cfg.seed == 42);
    CHECK(cfg.measures == std::vector<std::string>{"lazy"});
    CHECK_NOTHROW(validate(cfg));

    CHECK_THROWS_AS(parse_config("bogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("kind = nope\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);

    auto bad = cfg;
    bad.n.clear();
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.n = {8, 8};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.rho = {1.5};
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = parse_config("kind = avg-distance\nrho = 0.2\nn = 10\nreps = 1\n");
    CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("group specs and measures") {
    CHECK(parse_group_spec("Z^3")->rank() == 3);
    CHECK(parse_group_spec("Z/7")->order() == 7u);
    CHECK(parse_group_spec("F3")->kind() == GroupKind::Free);
    CHECK(parse_group_spec("Z x Z/2")->kind() == GroupKind::Product);
    CHECK_THROWS_AS(parse_group_spec("SL2"), ConfigError);
    auto lazy = make_measure(parse_group_spec("D_inf"), "lazy");
    CHECK(lazy.size() == 3);
    for (const auto& [e, m] : lazy.atoms()) CHECK(m == doctest::Approx(1.0 / 3.0));
    auto custom = make_measure(parse_group_spec("Z"), "custom", "[1]:1/4; [-1]:3/4");
    CHECK(custom.mass(Element{-1}) == doctest::Approx(0.75));
    CHECK_THROWS_AS(make_measure(parse_group_spec("Z"), "custom", "[1]:0.5"), ConfigError);
    CHECK_THROWS_AS(make_measure(parse_group_spec("Z"), "sws"), ConfigError);
}

TEST_CASE("report round trips") {
    std::vector<ReportRow> rows;
    rows.push_back({"exact-l1", "Z/5:lazy", 0.2, 10, "l1_product", 0.123456789012345, {}, {}, {}, {}});
    rows.push_back({"avg-distance", "Z:simple", 0.25, 100, "mean_distance", 1.0 / 3.0, 0.01, 1000, 7, 12.5});
    rows.push_back({"grigorchuk", "Grigorchuk", {}, {}, "refresh_rho1[d0=2]", 2.0 / 3.0, {}, {}, {}, {}});
    std::stringstream csv;
    write_csv(csv, rows);
    CHECK(csv.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.str().find("\r") == std::string::npos);
    CHECK(csv.str().find("exact-l1,Z/5:lazy,0.2,10,l1_product,0.123456789012345,,,,\n") != std::string::npos);
    CHECK(read_csv(csv) == rows);
    std::stringstream json;
    write_json(json, rows);
    CHECK(read_json(json) == rows);
    CHECK_THROWS_AS(emit_report(rows, "/nonexistent-dir/x.csv", "csv"), Error);
}

TEST_CASE("experiments are deterministic") {
    auto cfg = parse_config("kind = avg-distance, tv-event, speed\ngroup = F2\nrho = 0.2\nn = 50, 100\nreps = 200\n");
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(a == b);
    setenv("GROUPNOISE_THREADS", "1", 1);
    const auto c = run_experiment(cfg);
    unsetenv("GROUPNOISE_THREADS");
    CHECK(a == c);
    cfg.seed = 2;
    CHECK_FALSE(run_experiment(cfg) == a);
}

TEST_CASE("exact experiment rows") {
    const auto rows = run_experiment(preset_config("finite-mixing"));
    std::vector<double> l1;
    for (const auto& r : rows) {
        CHECK_FALSE(r.std_error.has_value());
        CHECK_FALSE(r.reps.has_value());
        if (r.metric == "l1_product") l1.push_back(r.value);
    }
    REQUIRE(l1.size() == 6);
    for (std::size_t i = 1; i < l1.size(); ++i) CHECK(l1[i] < l1[i - 1]);
    CHECK(preset_names().size() >= 6);
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
}

TEST_CASE("budget errors report the step reached") {
    auto cfg = parse_config("kind = exact-l1\ngroup = F2\nrho = 0.3\nn = 3, 20\nbudget = 1000\n");
    try {
        run_experiment(cfg);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.step_reached() >= 1);
        CHECK(e.step_reached() < 20);
    }
}

TEST_CASE("binary exit codes and byte-identical output") {
    const std::string cfg = write_temp("groupnoise_cli_test.cfg",
                                       "kind = exact-l1, avg-distance\ngroup = Z\nrho = 0.3\nn = 8, 16\nreps = 300\n");
    const auto dir = std::filesystem::temp_directory_path();
    const std::string out1 = (dir / "groupnoise_out1.csv").string(), out2 = (dir / "groupnoise_out2.csv").string();
    CHECK(run_cli("run " + cfg + " --seed 5 --out " + out1) == 0);
    CHECK(run_cli("run " + cfg + " --seed 5 --out " + out2, "GROUPNOISE_THREADS=1") == 0);
    CHECK(!slurp(out1).empty());
    CHECK(slurp(out1) == slurp(out2));
    const std::string js = (dir / "groupnoise_out.json").string();
    CHECK(run_cli("run " + cfg + " --set n=4 --format json --out " + js) == 0);
    CHECK(slurp(js).front() == '[');

    CHECK(run_cli("run " + cfg + " --set n=") == 2);
    CHECK(run_cli("run " + cfg + " --set rho=2") == 2);
    CHECK(run_cli("run /nonexistent.cfg") == 2);
    CHECK(run_cli("preset no-such-preset") == 2);
    CHECK(run_cli("run " + cfg + " --format xml") == 2);
    CHECK(run_cli("run " + cfg + " --set group=F2 --set budget=1000 --set n=2,30") == 3);
    CHECK(run_cli("preset list") == 0);
    CHECK(run_cli("preset finite-mixing --out " + out1) == 0);
    for (const auto& p : {cfg, out1, out2, js}) std::filesystem::remove(p);
}
