#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pricefb/analysis.hpp"
#include "pricefb/csv.hpp"
#include "pricefb/errors.hpp"
#include "pricefb/fd.hpp"
#include "pricefb/free_boundary.hpp"
#include "pricefb/model.hpp"
#include "pricefb/quadrature.hpp"
#include "pricefb/run_config.hpp"
#include "pricefb/spectral.hpp"
#include "pricefb/transform.hpp"

namespace pricefb {

/// Everything a simulation run produces, kept in memory; write_outputs()
/// serializes it. The primary solution is the spectral one whenever the run
/// includes it, the FD one otherwise.
struct RunArtifacts {
    RunConfig cfg;
    std::vector<double> times;
    CompatibleInitialDatum datum;
    SampledProfile F0;

    bool have_spectral = false;
    Projection projection;
    EigenFrequencies freqs;
    std::vector<SampledProfile> F_spectral, f_spectral;

    bool have_fd = false;
    SampledProfile F0_fd;
    std::vector<SampledProfile> F_fd, f_fd;

    FreeBoundaryPath path;               // tracked on the primary solution
    std::vector<double> lambdas;         // transaction rate per sample
    std::vector<MassPair> mass_history;  // [0] is t=0
    std::vector<std::pair<double, double>> strips_spectral, strips_fd;  // [0] is t=0
    std::vector<double> compare_rel_l2;  // both-solver discrepancy per sample

    Classification classification;
    int exit_code = 0;
    std::vector<std::string> warnings;
};

namespace detail {

inline SampledProfile resample_linear(const SampledProfile& src, int n) {
    SampledProfile dst = make_profile(src.L, n);
    for (int i = 0; i <= n; ++i) {
        const double x = dst.x(i);
        const double pos = (x + src.L) / src.h();
        int j = std::clamp(static_cast<int>(std::floor(pos)), 0, src.n() - 1);
        const double theta = std::clamp(pos - j, 0.0, 1.0);
        dst.values[i] = (1.0 - theta) * src.values[j] + theta * src.values[j + 1];
    }
    return dst;
}

}  // namespace detail

inline CompatibleInitialDatum build_datum(const RunConfig& cfg, int n) {
    if (cfg.datum_from_csv) {
        SampledProfile p = read_profile_csv(cfg.datum_path);
        if (std::abs(p.L - cfg.params.L) > 1e-12 * cfg.params.L)
            throw GridError("datum file half-width " + std::to_string(p.L) +
                            " does not match model.L=" + std::to_string(cfg.params.L));
        if (p.n() != n)
            throw GridError("datum file has n=" + std::to_string(p.n()) + " but the run needs n=" +
                            std::to_string(n));
        return validate_initial_datum(std::move(p), cfg.params);
    }
    return builtin_initial_datum(cfg.family, cfg.params, cfg.amplitude, n);
}

/// The full pipeline: datum -> forward transform -> evolve (series and/or FD)
/// -> inverse transform -> zero tracking -> diagnostics. Deterministic:
/// fixed-order summation everywhere, no randomness.
inline RunArtifacts run_simulation(const RunConfig& cfg) {
    RunArtifacts art;
    art.cfg = cfg;
    art.times = cfg.sample_times;

    art.datum = build_datum(cfg, cfg.n);
    art.F0 = forward_transform(art.datum.profile, art.datum.p0, cfg.params);

    if (cfg.solver != SolverChoice::fd) {
        art.have_spectral = true;
        art.freqs = eigenfrequencies(cfg.params, cfg.N);
        art.projection = project(art.F0, cfg.params, cfg.N);
        for (double t : art.times) {
            SampledProfile F =
                evaluate_profile(art.projection.coeffs, art.freqs, cfg.params.L, cfg.n, t);
            art.f_spectral.push_back(inverse_transform(F, cfg.params));
            art.F_spectral.push_back(std::move(F));
        }
        // Conservation is a property of the evolution, so the t=0 baseline is
        // the series itself at t=0; the projection residual (the one-time gap
        // to the datum) is reported in the diagnostics instead.
        const SampledProfile series0 =
            evaluate_profile(art.projection.coeffs, art.freqs, cfg.params.L, cfg.n, 0.0);
        art.strips_spectral.push_back(strip_integrals(series0, cfg.params));
        for (const SampledProfile& F : art.F_spectral)
            art.strips_spectral.push_back(strip_integrals(F, cfg.params));
    }

    if (cfg.solver != SolverChoice::spectral) {
        art.have_fd = true;
        const int nfd = cfg.fd.n > 0 ? cfg.fd.n : cfg.n;
        if (nfd == cfg.n) {
            art.F0_fd = art.F0;
        } else if (!cfg.datum_from_csv) {
            const CompatibleInitialDatum datum_fd = builtin_initial_datum(
                cfg.family, cfg.params, cfg.amplitude, nfd);
            art.F0_fd = forward_transform(datum_fd.profile, datum_fd.p0, cfg.params);
        } else {
            // File-sourced data: interpolate the heat-side profile, which
            // needs no sign-pattern revalidation.
            art.F0_fd = detail::resample_linear(art.F0, nfd);
            art.warnings.push_back("datum resampled linearly onto the FD grid (n=" +
                                   std::to_string(nfd) + ")");
        }
        FdConfig fdc = cfg.fd;
        fdc.n = art.F0_fd.n();
        FdResult r = solve_heat_fd(art.F0_fd, cfg.params, fdc, art.times);
        for (const std::string& w : r.warnings) art.warnings.push_back(w);
        art.F_fd = std::move(r.profiles);
        for (const SampledProfile& F : art.F_fd) art.f_fd.push_back(inverse_transform(F, cfg.params));
        art.strips_fd.push_back(strip_integrals(art.F0_fd, cfg.params));
        for (const SampledProfile& F : art.F_fd)
            art.strips_fd.push_back(strip_integrals(F, cfg.params));
    }

    const std::vector<SampledProfile>& F_primary =
        art.have_spectral ? art.F_spectral : art.F_fd;
    const std::vector<SampledProfile>& f_primary =
        art.have_spectral ? art.f_spectral : art.f_fd;

    art.path = track(art.times, F_primary, cfg.params);
    for (std::size_t i = 0; i < art.times.size(); ++i) {
        try {
            art.lambdas.push_back(compute_lambda(f_primary[i], art.path.p[i]).value);
        } catch (const BoundaryError&) {
            art.lambdas.push_back(std::numeric_limits<double>::quiet_NaN());
            art.warnings.push_back("lambda undefined at t=" + std::to_string(art.times[i]) +
                                   " (price within h of the boundary)");
        }
    }

    // Mass baseline likewise tracks the primary solver's own initial state:
    // the FD scheme starts from the datum itself, the series starts from its
    // projection.
    if (art.have_spectral) {
        const SampledProfile S0 =
            evaluate_profile(art.projection.coeffs, art.freqs, cfg.params.L, cfg.n, 0.0);
        const SampledProfile f0 = inverse_transform(S0, cfg.params);
        art.mass_history.push_back(masses(f0, locate_zero(S0).x, cfg.params));
    } else {
        art.mass_history.push_back(masses(art.datum.profile, art.datum.p0, cfg.params));
    }
    for (std::size_t i = 0; i < art.times.size(); ++i)
        art.mass_history.push_back(masses(f_primary[i], art.path.p[i], cfg.params));

    if (art.have_spectral && art.have_fd) {
        const int nfd = art.F0_fd.n();
        for (std::size_t i = 0; i < art.times.size(); ++i) {
            const SampledProfile F_sp_on_fd = evaluate_profile(
                art.projection.coeffs, art.freqs, cfg.params.L, nfd, art.times[i]);
            const double denom = l2_norm(art.F_fd[i]);
            art.compare_rel_l2.push_back(denom > 0.0 ? l2_distance(F_sp_on_fd, art.F_fd[i]) / denom
                                                     : l2_distance(F_sp_on_fd, art.F_fd[i]));
        }
    }

    art.classification = classify_global_existence(art.path);
    art.exit_code = art.classification.mass_conserving_global ? 0 : 2;
    return art;
}

/// Writes every CSV plus the manifest into cfg.output_dir; returns the file
/// list. The manifest's config section reproduces the run verbatim.
inline std::vector<std::string> write_outputs(const RunArtifacts& art) {
    namespace fs = std::filesystem;
    const fs::path dir(art.cfg.output_dir);
    fs::create_directories(dir / "profiles");
    std::vector<std::string> files;
    const auto add = [&](const fs::path& p) { files.push_back(p.string()); };

    const auto profile_name = [](const char* stem, std::size_t i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s_%04zu.csv", stem, i + 1);
        return std::string(buf);
    };

    write_profile_csv((dir / "profiles" / "f_initial.csv").string(), art.datum.profile);
    add(dir / "profiles" / "f_initial.csv");
    write_profile_csv((dir / "profiles" / "F_initial.csv").string(), art.F0);
    add(dir / "profiles" / "F_initial.csv");

    if (art.have_spectral) {
        write_frequencies_csv((dir / "frequencies.csv").string(), art.freqs);
        add(dir / "frequencies.csv");
        write_coefficients_csv((dir / "coefficients.csv").string(), art.projection.coeffs);
        add(dir / "coefficients.csv");
        for (std::size_t i = 0; i < art.times.size(); ++i) {
            write_profile_csv((dir / "profiles" / profile_name("F_spectral", i)).string(),
                              art.F_spectral[i]);
            add(dir / "profiles" / profile_name("F_spectral", i));
            write_profile_csv((dir / "profiles" / profile_name("f_spectral", i)).string(),
                              art.f_spectral[i]);
            add(dir / "profiles" / profile_name("f_spectral", i));
        }
    }
    if (art.have_fd) {
        for (std::size_t i = 0; i < art.times.size(); ++i) {
            write_profile_csv((dir / "profiles" / profile_name("F_fd", i)).string(), art.F_fd[i]);
            add(dir / "profiles" / profile_name("F_fd", i));
            write_profile_csv((dir / "profiles" / profile_name("f_fd", i)).string(), art.f_fd[i]);
            add(dir / "profiles" / profile_name("f_fd", i));
        }
    }

    {
        std::ofstream out(dir / "path.csv");
        out << "t,p,status,lambda\n";
        for (std::size_t i = 0; i < art.path.times.size(); ++i)
            out << format_double(art.path.times[i]) << ',' << format_double(art.path.p[i]) << ','
                << to_string(art.path.status[i]) << ',' << format_double(art.lambdas[i]) << '\n';
        add(dir / "path.csv");
    }
    {
        std::ofstream out(dir / "masses.csv");
        out << "t,M_B,M_V\n";
        out << "0," << format_double(art.mass_history[0].buyers) << ','
            << format_double(art.mass_history[0].vendors) << '\n';
        for (std::size_t i = 0; i < art.times.size(); ++i)
            out << format_double(art.times[i]) << ','
                << format_double(art.mass_history[i + 1].buyers) << ','
                << format_double(art.mass_history[i + 1].vendors) << '\n';
        add(dir / "masses.csv");
    }
    const auto write_strips = [&](const char* name,
                                  const std::vector<std::pair<double, double>>& strips) {
        std::ofstream out(dir / name);
        out << "t,left,right\n";
        out << "0," << format_double(strips[0].first) << ',' << format_double(strips[0].second)
            << '\n';
        for (std::size_t i = 0; i < art.times.size(); ++i)
            out << format_double(art.times[i]) << ',' << format_double(strips[i + 1].first) << ','
                << format_double(strips[i + 1].second) << '\n';
        add(dir / name);
    };
    if (art.have_spectral) write_strips("strips_spectral.csv", art.strips_spectral);
    if (art.have_fd) write_strips("strips_fd.csv", art.strips_fd);

    if (!art.compare_rel_l2.empty()) {
        std::ofstream out(dir / "compare.csv");
        out << "t,rel_l2_F\n";
        for (std::size_t i = 0; i < art.times.size(); ++i)
            out << format_double(art.times[i]) << ',' << format_double(art.compare_rel_l2[i])
                << '\n';
        add(dir / "compare.csv");
    }

    {
        std::ofstream out(dir / "manifest.txt");
        out << "# run manifest; the sections below reproduce the run\n";
        out << config_text(art.cfg);
        out << "[result]\n";
        out << "status = "
            << (art.classification.mass_conserving_global ? "mass-conserving-global" : "breakdown")
            << '\n';
        if (!art.classification.mass_conserving_global)
            out << "breakdown_time = " << format_double(art.classification.breakdown_time) << '\n';
        out << "exit_code = " << art.exit_code << '\n';
        for (const std::string& w : art.warnings) out << "warning = " << w << '\n';
        out << "[times]\n";
        for (std::size_t i = 0; i < art.times.size(); ++i) {
            char key[32];
            std::snprintf(key, sizeof key, "t_%04zu", i + 1);
            out << key << " = " << format_double(art.times[i]) << '\n';
        }
        out << "[files]\n";
        for (const std::string& f : files) out << "file = " << f << '\n';
        add(dir / "manifest.txt");
    }
    return files;
}

struct ValidationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Dry run: every module-level preflight check, nothing evolved.
inline std::vector<ValidationCheck> run_validation(const RunConfig& cfg) {
    std::vector<ValidationCheck> checks;
    const auto push = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };

    push("params", true,
         "L=" + format_double(cfg.params.L) + " a=" + format_double(cfg.params.a) +
             " p0=" + format_double(cfg.params.p0));

    int shift = 0;
    try {
        shift = shift_cells(make_profile(cfg.params.L, cfg.n), cfg.params.a);
        push("grid-shift", true, "a/h = " + std::to_string(shift));
    } catch (const Error& e) {
        push("grid-shift", false, e.what());
    }

    if (cfg.solver != SolverChoice::fd) {
        const double shortest_period = cfg.params.a / cfg.N;
        const double npp = shortest_period / (2.0 * cfg.params.L / cfg.n);
        push("spectral-resolution", npp >= 8.0 - 1e-9,
             std::to_string(npp) + " nodes per shortest basis period (need >= 8)");

        const EigenFrequencies fr = eigenfrequencies(cfg.params, cfg.N);
        double worst = 0.0;
        for (int l = 0; l < cfg.N; ++l) {
            const DispersionResidual r1 = verify_dispersion(fr.omega1[l], cfg.params);
            const DispersionResidual r2 = verify_dispersion(fr.omega2[l], cfg.params);
            const DispersionResidual r3 = verify_dispersion(fr.omega3[l], cfg.params);
            worst = std::max({worst, std::abs(r1.G), std::abs(r1.H), std::abs(r2.G),
                              std::abs(r3.H)});
        }
        push("dispersion", worst < 1e-12, "max residual " + format_double(worst));
    }

    std::optional<CompatibleInitialDatum> datum;
    try {
        datum = build_datum(cfg, cfg.n);
        push("datum", true,
             "compatible; p0 snapped to " + format_double(datum->p0) + " (distance " +
                 format_double(datum->snap.distance) + ")");
    } catch (const Error& e) {
        push("datum", false, e.what());
    }

    if (datum) {
        try {
            const SampledProfile F = forward_transform(datum->profile, datum->p0, cfg.params);
            const SampledProfile back = inverse_transform(F, cfg.params);
            double err = 0.0;
            for (int i = 0; i <= back.n(); ++i)
                err = std::max(err, std::abs(back.values[i] - datum->profile.values[i]));
            const double bound = 1e-12 * max_abs(datum->profile);
            push("transform-round-trip", err <= bound,
                 "max |inverse(forward(f)) - f| = " + format_double(err));

            if (cfg.solver != SolverChoice::fd) {
                const Projection proj = project(F, cfg.params, cfg.N);
                std::ostringstream detail;
                detail << "condition " << format_double(proj.diag.condition) << ", collisions "
                       << proj.diag.collisions << ", residual " << format_double(proj.diag.residual_rel);
                push("gram", true, detail.str());
            }
        } catch (const Error& e) {
            push(cfg.solver != SolverChoice::fd ? "gram" : "transform-round-trip", false, e.what());
        }
    }

    if (cfg.solver != SolverChoice::spectral) {
        const int nfd = cfg.fd.n > 0 ? cfg.fd.n : cfg.n;
        const double h = 2.0 * cfg.params.L / nfd;
        std::ostringstream detail;
        detail << "dt=" << format_double(cfg.fd.dt) << ", h=" << format_double(h);
        if (cfg.fd.scheme == FdScheme::crank_nicolson && cfg.fd.dt > h)
            detail << " (note: dt <= h recommended for non-oscillatory crank-nicolson)";
        push("fd-config", true, detail.str());
    }
    return checks;
}

struct SweepRow {
    double L = 0.0, a = 0.0, MB = 0.0, MV = 0.0;
    double ratio = 0.0, lo = 0.0, hi = 0.0;
    bool admissible = false;
    double p_inf = 0.0, alpha = 0.0;
};

inline std::vector<SweepRow> run_sweep(const std::vector<double>& Ls, const std::vector<double>& as,
                                       const std::vector<double>& MBs,
                                       const std::vector<double>& MVs) {
    std::vector<SweepRow> rows;
    for (double L : Ls)
        for (double a : as)
            for (double MB : MBs)
                for (double MV : MVs) {
                    const ModelParams params = validate_params(L, a, 0.0);
                    const AdmissibilityCheck c = nonexistence_check(MassPair{MB, MV}, params);
                    rows.push_back({L, a, MB, MV, c.ratio, c.lo, c.hi, c.admissible, c.p_inf,
                                    c.alpha});
                }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << "L,a,MB,MV,ratio,lo,hi,admissible,p_inf,alpha\n";
    for (const SweepRow& r : rows)
        out << format_double(r.L) << ',' << format_double(r.a) << ',' << format_double(r.MB) << ','
            << format_double(r.MV) << ',' << format_double(r.ratio) << ',' << format_double(r.lo)
            << ',' << format_double(r.hi) << ',' << (r.admissible ? 1 : 0) << ','
            << format_double(r.p_inf) << ',' << format_double(r.alpha) << '\n';
    return out.str();
}

}  // namespace pricefb
