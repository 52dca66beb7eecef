#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pricefb/pipeline.hpp"
#include "pricefb/run_config.hpp"

using namespace pricefb;
namespace fs = std::filesystem;

namespace {

const char* kBaseConfig = R"(# symmetric reference run
[model]
L = 1.0
a = 0.5
p0 = 0.0
[datum]
family = linear
amplitude = 1.0
[grid]
n = 1024
[spectral]
N = 16
[time]
T = 0.4
sample_times = 0.1, 0.2, 0.4
[solver]
kind = spectral
[output]
dir = OUTDIR
)";

fs::path write_config(const std::string& text, const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "pricefb_test_config";
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string base_config_with_outdir(const std::string& outdir) {
    std::string text = kBaseConfig;
    text.replace(text.find("OUTDIR"), 6, outdir);
    return text;
}

}  // namespace

TEST_CASE("config files parse into validated run configs", "[config]") {
    const fs::path path = write_config(base_config_with_outdir("out_test"), "ok.cfg");
    const RunConfig cfg = load_run_config(path.string());
    REQUIRE(cfg.params.L == 1.0);
    REQUIRE(cfg.params.a == 0.5);
    REQUIRE(cfg.n == 1024);
    REQUIRE(cfg.N == 16);
    REQUIRE(cfg.sample_times.size() == 3);
    REQUIRE(cfg.solver == SolverChoice::spectral);
    REQUIRE(cfg.output_dir == "out_test");
}

TEST_CASE("config errors name the field and line", "[config]") {
    SECTION("malformed line carries its number") {
        const fs::path path = write_config("[model]\nL == 1.0\n", "bad_line.cfg");
        try {
            load_run_config(path.string());
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            REQUIRE(e.line == 2);
        }
    }
    SECTION("unknown keys are rejected by name") {
        std::string text = base_config_with_outdir("x");
        text += "[model]\nLL = 2\n";
        const fs::path path = write_config(text, "unknown_key.cfg");
        REQUIRE_THROWS_WITH(load_run_config(path.string()),
                            Catch::Matchers::ContainsSubstring("model.LL"));
    }
    SECTION("missing required keys are named") {
        const fs::path path = write_config("[model]\nL = 1.0\na = 0.5\n", "missing.cfg");
        REQUIRE_THROWS_WITH(load_run_config(path.string()),
                            Catch::Matchers::ContainsSubstring("model.p0"));
    }
    SECTION("module constraints are re-validated at load") {
        std::string text = base_config_with_outdir("x");
        const fs::path path = write_config(text, "badgrid.cfg");
        REQUIRE_THROWS_AS(load_run_config(path.string(), {"grid.n=1023"}), ConfigError);
        REQUIRE_THROWS_AS(load_run_config(path.string(), {"model.a=0.513"}), GridError);
        REQUIRE_THROWS_AS(load_run_config(path.string(), {"model.p0=0.9"}), ParamError);
    }
    SECTION("overrides replace keys") {
        const fs::path path = write_config(base_config_with_outdir("x"), "override.cfg");
        const RunConfig cfg = load_run_config(path.string(), {"spectral.N=8", "time.T=0.2",
                                                              "time.sample_times=0.1, 0.2"});
        REQUIRE(cfg.N == 8);
        REQUIRE(cfg.T == 0.2);
        REQUIRE(cfg.sample_times.size() == 2);
    }
}

TEST_CASE("config text round-trips through the parser", "[config]") {
    const fs::path path = write_config(base_config_with_outdir("out_rt"), "roundtrip.cfg");
    const RunConfig cfg = load_run_config(path.string());
    const std::string text = config_text(cfg);
    const detail::ConfigMap map = detail::parse_config_text(text, "manifest");
    const RunConfig back = make_run_config(map, "manifest");
    REQUIRE(back.params.L == cfg.params.L);
    REQUIRE(back.params.a == cfg.params.a);
    REQUIRE(back.params.p0 == cfg.params.p0);
    REQUIRE(back.n == cfg.n);
    REQUIRE(back.N == cfg.N);
    REQUIRE(back.sample_times == cfg.sample_times);
    REQUIRE(back.output_dir == cfg.output_dir);
}

TEST_CASE("the pipeline runs a symmetric case and writes deterministic outputs", "[pipeline]") {
    const fs::path outdir = fs::temp_directory_path() / "pricefb_run_sym";
    fs::remove_all(outdir);
    const fs::path path =
        write_config(base_config_with_outdir((outdir / "a").string()), "sym.cfg");
    const RunConfig cfg = load_run_config(path.string());

    const RunArtifacts art = run_simulation(cfg);
    REQUIRE(art.exit_code == 0);
    REQUIRE(art.classification.mass_conserving_global);
    for (double p : art.path.p) REQUIRE(std::abs(p) < 1e-9);
    for (double l : art.lambdas) REQUIRE(l >= 0.0);

    const std::vector<std::string> files = write_outputs(art);
    for (const std::string& f : files) REQUIRE(fs::exists(f));

    // determinism: a second run writes byte-identical outputs
    RunConfig cfg2 = cfg;
    cfg2.output_dir = (outdir / "b").string();
    const RunArtifacts art2 = run_simulation(cfg2);
    write_outputs(art2);
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    for (const char* name : {"path.csv", "masses.csv", "strips_spectral.csv", "coefficients.csv"})
        REQUIRE(slurp(outdir / "a" / name) == slurp(outdir / "b" / name));

    // manifest contains a config block that reproduces the run
    const std::string manifest = slurp(outdir / "a" / "manifest.txt");
    REQUIRE(manifest.find("[model]") != std::string::npos);
    REQUIRE(manifest.find("status = mass-conserving-global") != std::string::npos);
    fs::remove_all(outdir);
}

TEST_CASE("the pipeline detects breakdown and keeps writing outputs", "[pipeline]") {
    const fs::path outdir = fs::temp_directory_path() / "pricefb_run_breakdown";
    fs::remove_all(outdir);
    std::string text = base_config_with_outdir(outdir.string());
    const fs::path path = write_config(text, "breakdown.cfg");
    // mass ratio ~6 > 5: the limit price sits outside [-L+a, L-a]
    const RunConfig cfg = load_run_config(
        path.string(), {"model.p0=0.4202", "time.T=2.4", "time.samples=40", "spectral.N=32",
                        "grid.n=2048"});
    const RunArtifacts art = run_simulation(cfg);
    REQUIRE(art.exit_code == 2);
    REQUIRE_FALSE(art.classification.mass_conserving_global);
    REQUIRE(std::isfinite(art.classification.breakdown_time));

    write_outputs(art);
    REQUIRE(fs::exists(outdir / "manifest.txt"));
    REQUIRE(fs::exists(outdir / "path.csv"));
    fs::remove_all(outdir);
}

TEST_CASE("validation reports pass and fail per check", "[pipeline]") {
    const fs::path path = write_config(base_config_with_outdir("unused"), "validate.cfg");
    const RunConfig good = load_run_config(path.string());
    bool all = true;
    for (const ValidationCheck& c : run_validation(good)) all = all && c.pass;
    REQUIRE(all);

    // under-resolved spectral grid: config loads (a/h integral) but the
    // aliasing precondition fails
    const RunConfig bad = load_run_config(path.string(), {"grid.n=256", "spectral.N=64"});
    bool resolution_failed = false;
    for (const ValidationCheck& c : run_validation(bad))
        if (c.name == "spectral-resolution") resolution_failed = !c.pass;
    REQUIRE(resolution_failed);
}

TEST_CASE("sweep rows follow the admissibility formulas", "[pipeline]") {
    const std::vector<SweepRow> rows =
        run_sweep({1.0}, {0.5}, {0.75, 6.0}, {0.75, 1.0});
    REQUIRE(rows.size() == 4);
    const std::string csv = sweep_csv(rows);
    REQUIRE(csv.find("L,a,MB,MV,ratio,lo,hi,admissible,p_inf,alpha") == 0);
    for (const SweepRow& r : rows) {
        REQUIRE(r.lo == Catch::Approx(0.2));
        REQUIRE(r.hi == Catch::Approx(5.0));
        REQUIRE(r.admissible == (r.ratio >= r.lo && r.ratio <= r.hi));
    }
}
