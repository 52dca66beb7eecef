// Command-line front end: simulate | check | validate | sweep.
// Exit codes: 0 success/admissible, 1 error, 2 breakdown/inadmissible.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pricefb/analysis.hpp"
#include "pricefb/pipeline.hpp"
#include "pricefb/run_config.hpp"

namespace {

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides) {
    const pricefb::RunConfig cfg = pricefb::load_run_config(config_path, overrides);
    const pricefb::RunArtifacts art = pricefb::run_simulation(cfg);
    pricefb::write_outputs(art);

    for (const std::string& w : art.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "run: " << art.times.size() << " samples, solver "
              << (art.have_spectral && art.have_fd ? "both"
                  : art.have_spectral             ? "spectral"
                                                  : "fd")
              << ", outputs in " << cfg.output_dir << '\n';
    if (art.have_spectral)
        std::cout << "projection: residual " << pricefb::format_double(art.projection.diag.residual_rel)
                  << " (relative L2), condition "
                  << pricefb::format_double(art.projection.diag.condition) << ", collisions "
                  << art.projection.diag.collisions << '\n';
    if (!art.compare_rel_l2.empty()) {
        double worst = 0.0;
        for (double d : art.compare_rel_l2) worst = std::max(worst, d);
        std::cout << "solver discrepancy: max relative L2 " << pricefb::format_double(worst) << '\n';
    }
    if (art.classification.mass_conserving_global) {
        std::cout << "classification: mass-conserving-global over the sampled horizon\n";
    } else {
        std::cout << "classification: breakdown-at(t="
                  << pricefb::format_double(art.classification.breakdown_time)
                  << "), p=" << pricefb::format_double(art.path.p[art.classification.breakdown_index])
                  << " (" << pricefb::to_string(art.path.status[art.classification.breakdown_index])
                  << ")\n";
    }
    return art.exit_code;
}

int cmd_check(double L, double a, double MB, double MV) {
    const pricefb::ModelParams params = pricefb::validate_params(L, a, 0.0);
    const pricefb::AdmissibilityCheck c =
        pricefb::nonexistence_check(pricefb::MassPair{MB, MV}, params);
    std::cout << "ratio      = " << pricefb::format_double(c.ratio) << '\n';
    std::cout << "interval   = [" << pricefb::format_double(c.lo) << ", "
              << pricefb::format_double(c.hi) << "]\n";
    std::cout << "admissible = " << (c.admissible ? "yes" : "no") << '\n';
    if (c.admissible) {
        std::cout << "alpha      = " << pricefb::format_double(c.alpha) << '\n';
        std::cout << "p_inf      = " << pricefb::format_double(c.p_inf) << '\n';
        const double span = c.hi - c.lo;
        if (std::abs(c.ratio - c.lo) <= 1e-12 * span || std::abs(c.ratio - c.hi) <= 1e-12 * span)
            std::cout << "note: ratio sits on the interval endpoint; the steady price equals "
                         "+-(L-a), the boundary of the open interval required for a "
                         "mass-conserving global solution\n";
    }
    return c.admissible ? 0 : 2;
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides) {
    const pricefb::RunConfig cfg = pricefb::load_run_config(config_path, overrides);
    const std::vector<pricefb::ValidationCheck> checks = pricefb::run_validation(cfg);
    bool all = true;
    for (const pricefb::ValidationCheck& c : checks) {
        std::printf("%-24s %-4s %s\n", c.name.c_str(), c.pass ? "ok" : "FAIL", c.detail.c_str());
        all = all && c.pass;
    }
    return all ? 0 : 1;
}

int cmd_sweep(const std::vector<double>& Ls, const std::vector<double>& as,
              const std::vector<double>& MBs, const std::vector<double>& MVs,
              const std::string& out_path) {
    const std::vector<pricefb::SweepRow> rows = pricefb::run_sweep(Ls, as, MBs, MVs);
    const std::string csv = pricefb::sweep_csv(rows);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) throw pricefb::Error("cannot open '" + out_path + "' for writing");
        out << csv;
        std::cout << rows.size() << " rows written to " << out_path << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"price formation free boundary solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    auto* simulate = app.add_subcommand("simulate", "run the full pipeline and write CSV outputs");
    simulate->add_option("-c,--config", config_path, "run configuration file")->required();
    simulate->add_option("--set", overrides, "override a config key, e.g. --set spectral.N=96");

    double L = 1.0, a = 0.5, MB = 0.0, MV = 0.0;
    auto* check = app.add_subcommand("check", "steady-state admissibility from masses alone");
    check->add_option("--L", L, "domain half-width")->required();
    check->add_option("--a", a, "transaction cost")->required();
    check->add_option("--MB", MB, "buyer mass")->required();
    check->add_option("--MV", MV, "vendor mass")->required();

    std::string vconfig_path;
    std::vector<std::string> voverrides;
    auto* validate = app.add_subcommand("validate", "preflight checks without evolving");
    validate->add_option("-c,--config", vconfig_path, "run configuration file")->required();
    validate->add_option("--set", voverrides, "override a config key");

    std::vector<double> Ls{1.0}, as{0.5}, MBs, MVs;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "admissibility table over mass/parameter lists");
    sweep->add_option("--L", Ls, "domain half-width values");
    sweep->add_option("--a", as, "transaction cost values");
    sweep->add_option("--MB", MBs, "buyer mass values")->required();
    sweep->add_option("--MV", MVs, "vendor mass values")->required();
    sweep->add_option("-o,--out", sweep_out, "write the CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, overrides);
        if (check->parsed()) return cmd_check(L, a, MB, MV);
        if (validate->parsed()) return cmd_validate(vconfig_path, voverrides);
        if (sweep->parsed()) return cmd_sweep(Ls, as, MBs, MVs, sweep_out);
    } catch (const pricefb::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
