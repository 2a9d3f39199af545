// Copyright 2026 The dfgqi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dfgqi/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dfgqi/conversion.h"
#include "dfgqi/detection.h"
#include "dfgqi/errors.h"
#include "dfgqi/export.h"
#include "dfgqi/montecarlo.h"
#include "dfgqi/qpm.h"
#include "dfgqi/repeater.h"
#include "dfgqi/scenario.h"

namespace fs = std::filesystem;

namespace dfgqi {

namespace {

struct Options {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> phases;
    std::optional<std::string> powers;
    std::optional<std::uint64_t> pulses;
};

struct Output {
    std::string name;
    std::string content;
};

struct Context {
    const Scenario &s;
    std::string digest;
    std::ostream &out;
    std::vector<Output> files;
};

void add_common(CLI::App *cmd, Options &o) {
    cmd->add_option("--scenario", o.scenario, "scenario file")->required();
    cmd->add_option("--out", o.out, fmt::format("output directory (default ${} or .)", kOutDirEnv));
    cmd->add_option("--seed", o.seed, "master seed override");
    cmd->add_option("--phases", o.phases, "analysis phases start:stop:n (rad)");
    cmd->add_option("--powers", o.powers, "pump powers start:stop:n (W)");
    cmd->add_option("--pulses", o.pulses, "pulses per phase point");
}

Grid grid_override(const std::string &flag, const std::string &text) {
    try {
        return Grid::parse(text);
    } catch (const DomainError &e) {
        throw ConfigError("<command line>", flag, e.what());
    }
}

Scenario load_with_overrides(const Options &o) {
    Scenario s = load_scenario(o.scenario);
    if (o.seed) {
        s.seed = *o.seed;
    }
    if (o.phases) {
        s.phases = grid_override("--phases", *o.phases);
    }
    if (o.powers) {
        s.powers = grid_override("--powers", *o.powers);
    }
    if (o.pulses) {
        s.pulses_per_point = *o.pulses;
    }
    return s;
}

fs::path output_dir(const Options &o) {
    if (!o.out.empty()) {
        return o.out;
    }
    if (const char *env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

void cmd_qpm_solve(Context &c) {
    const Scenario &s = c.s;
    const double ls = s.signal_wavelength_um;
    const double lp = s.pump.wavelength_um;
    const double lo = s.output_wavelength_um();
    const double t = s.qpm.temperature_k;
    const auto &m = s.sellmeier;
    fmt::print(c.out, "sellmeier          {}\n", m.name);
    fmt::print(c.out, "signal             {:.6f} um   n_e = {:.6f}\n", ls, refractive_index(ls, t, m));
    fmt::print(c.out, "pump               {:.6f} um   n_e = {:.6f}\n", lp, refractive_index(lp, t, m));
    fmt::print(c.out, "output             {:.6f} um   n_e = {:.6f}\n", lo, refractive_index(lo, t, m));
    const double bulk = solve_poling_period(ls, lp, t, s.qpm.order, m);
    fmt::print(c.out, "bulk period        {:.4f} um (order {}, {:.1f} K)\n", bulk, s.qpm.order, t);
    const double dk = phase_mismatch(ls, lp, lo, s.qpm, m);
    fmt::print(c.out, "device period      {:.4f} um   dk = {:.6g} rad/um   sinc^2 = {:.3e}\n", s.qpm.period_um, dk,
               qpm_acceptance(dk, s.qpm.length_cm));
    try {
        const double pump = solve_pump_wavelength(s.qpm.period_um, ls, t, m, s.qpm.order);
        fmt::print(c.out, "pump for device    {:.6f} um (output {:.6f} um)\n", pump, dfg_output_wavelength(ls, pump));
    } catch (const SolverError &e) {
        fmt::print(c.out, "pump for device    none: {}\n", e.what());
    }
}

void cmd_budget(Context &c) {
    const Scenario &s = c.s;
    const auto b = efficiency_budget(s.pump.power_w, s.eta_norm_per_w_cm2, s.qpm.length_cm, s.chain_pre,
                                     s.chain_post, s.waveguide_post_stages);
    fmt::print(c.out, "{:<28} {:>12} {:>12}\n", "stage", "transmission", "cumulative");
    double cumulative = 1.0;
    for (const auto &r : b.pre) {
        fmt::print(c.out, "{:<28} {:>12.5f} {:>12.5f}\n", r.name, r.transmission, r.cumulative);
        cumulative = r.cumulative;
    }
    cumulative *= b.internal_efficiency;
    fmt::print(c.out, "{:<28} {:>12.5f} {:>12.5f}\n",
               fmt::format("conversion @ {:.3f} W", s.pump.power_w), b.internal_efficiency, cumulative);
    for (const auto &r : b.post) {
        fmt::print(c.out, "{:<28} {:>12.5f} {:>12.6f}\n", r.name, r.transmission, cumulative * r.cumulative);
    }
    fmt::print(c.out, "waveguide exit fraction      {:.3f} %   (quoted {:.1f} %)\n", 100.0 * b.waveguide_exit_fraction,
               100.0 * kQuotedExitFraction);
    fmt::print(c.out, "eta_QI                       {:.3f} %\n", 100.0 * b.eta_qi);
}

void cmd_efficiency(Context &c) {
    const auto powers = c.s.powers.values();
    const auto rows = run_efficiency_sweep(c.s, powers);
    fmt::print(c.out, "{:>10} {:>14} {:>14} {:>12} {:>10}\n", "P [W]", "eta analytic", "eta MC", "stat err",
               "att [dB]");
    for (const auto &r : rows) {
        fmt::print(c.out, "{:>10.4f} {:>13.5f}% {:>13.5f}% {:>11.5f}% {:>10.2f}\n", r.power_w, 100 * r.eta_analytic,
                   100 * r.eta_mc, 100 * r.stat_error, r.attenuation_db);
    }
    RunMetadata meta{c.s.seed, c.digest, c.s.pulses_per_point, DFGQI_VERSION, 0};
    c.files.push_back({artifact_name(c.digest, "efficiency"), efficiency_csv(rows, run_metadata(meta))});
}

void cmd_fringe(Context &c) {
    const auto phases = c.s.phases.values();
    const auto r = run_fringe_scan(c.s, phases);
    const auto samples = r.samples();
    const double b = r.mean_background();
    const auto fit = extract_visibility(samples, b);
    fmt::print(c.out, "{:>10} {:>10} {:>10} {:>10}\n", "beta", "counts", "stat err", "bkg");
    for (const auto &p : r.fringe) {
        fmt::print(c.out, "{:>10.4f} {:>10} {:>10.1f} {:>10}\n", p.phase_rad, p.counts, p.stat_error, p.background);
    }
    fmt::print(c.out, "V_raw = {:.4f} +- {:.4f}\n", fit.v_raw, fit.sigma_v_raw);
    fmt::print(c.out, "V_net = {:.4f} +- {:.4f}   (background {:.1f} counts/point)\n", fit.v_net, fit.sigma_v_net, b);
    fmt::print(c.out, "fit chi2/dof = {:.3f}\n", fit.chi2_per_dof);
    c.files.push_back({artifact_name(c.digest, "fringe"), fringe_csv(r.fringe, run_metadata(r.metadata))});
}

void cmd_histogram(Context &c) {
    const auto r = run_histogram(c.s);
    const double dtau = c.s.analysis.delta_tau_ns;
    fmt::print(c.out, "detections         {}\n", r.histogram.total());
    for (int k = 0; k < 3; ++k) {
        const double seed = c.s.tac_offset_ns + k * dtau;
        try {
            fmt::print(c.out, "peak at {:6.3f} ns  FWHM {:.3f} ns\n", seed, peak_fwhm(r.histogram, seed));
        } catch (const SolverError &e) {
            fmt::print(c.out, "peak at {:6.3f} ns  {}\n", seed, e.what());
        }
    }
    const auto sca = sca_counts(r.histogram, c.s.sca, dtau, c.s.peak_shape());
    fmt::print(c.out, "SCA counts         {} (side-peak leakage {:.3f} %)\n", sca.counts, 100 * sca.leakage_fraction);
    c.files.push_back({artifact_name(c.digest, "histogram"), histogram_csv(r.histogram, run_metadata(r.metadata))});
}

void cmd_repeater(Context &c) {
    const auto lengths = c.s.lengths_km.values();
    const auto rows = rate_comparison(c.s.link, lengths);
    const auto &l = c.s.link;
    fmt::print(c.out, "break-even length  {:.3f} km\n",
               break_even_distance(l.interface_efficiency, l.native_attenuation_db_per_km,
                                   l.telecom_attenuation_db_per_km));
    fmt::print(c.out, "{:>8} {:>12} {:>12} {:>12}\n", "L [km]", "p with", "p without", "ratio");
    for (const auto &r : rows) {
        fmt::print(c.out, "{:>8.2f} {:>12.4e} {:>12.4e} {:>12.4e}\n", r.length_km, r.p_with, r.p_without, r.ratio);
    }
    RunMetadata meta{c.s.seed, c.digest, c.s.pulses_per_point, DFGQI_VERSION, 0};
    CsvMetadata md = run_metadata(meta);
    md.emplace_back("protocol", std::string(to_string(l.protocol)));
    c.files.push_back({artifact_name(c.digest, "repeater"), repeater_csv(rows, md)});
}

void cmd_validate(Context &c) {
    const auto phases = c.s.phases.values();
    const auto rep = validate_against_oracle(c.s, phases);
    fmt::print(c.out, "{:>10} {:>12} {:>12} {:>8}\n", "beta", "observed", "expected", "z");
    for (const auto &r : rep.rows) {
        fmt::print(c.out, "{:>10.4f} {:>12.0f} {:>12.1f} {:>8.2f}{}\n", r.phase_rad, r.observed, r.expected, r.z,
                   r.flagged ? "  FLAGGED" : "");
    }
    if (rep.chi2_per_dof) {
        fmt::print(c.out, "chi2/dof = {:.3f} over {} points, {} flagged beyond {} sigma\n", *rep.chi2_per_dof, rep.dof,
                   rep.flagged, kOracleFlagSigma);
    } else {
        fmt::print(c.out, "chi2/dof undefined: no point has a nonzero expectation\n");
    }
}

void append_run_log(const fs::path &dir, const std::string &command, const Options &o, const Scenario &s,
                    const std::string &digest, int code) {
    std::ofstream log(dir / "run.log", std::ios::app);
    if (log) {
        fmt::print(log, "dfgqi {} {} scenario={} digest={} seed={} exit={}\n", DFGQI_VERSION, command, o.scenario,
                   digest, s.seed, code);
    }
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Simulation of a telecom quantum interface for time-bin qubits", "dfgqi"};
    app.set_version_flag("--version", DFGQI_VERSION);
    app.require_subcommand(1);
    Options o;

    using Handler = std::function<void(Context &)>;
    const std::vector<std::tuple<const char *, const char *, Handler>> commands = {
        {"qpm-solve", "poling period and phase matching at the scenario temperature", cmd_qpm_solve},
        {"efficiency-curve", "eta_QI versus pump power, analytic and Monte Carlo", cmd_efficiency},
        {"fringe-scan", "Monte Carlo interference fringe over the analysis phase", cmd_fringe},
        {"histogram", "TAC histogram at the scenario's analysis phase", cmd_histogram},
        {"repeater-rates", "elementary-link rates with and without the interface", cmd_repeater},
        {"budget", "loss-chain table ending in eta_QI", cmd_budget},
        {"validate", "Monte Carlo fringe against the analytic oracle", cmd_validate},
    };
    for (const auto &[name, help, fn] : commands) {
        add_common(app.add_subcommand(name, help), o);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
    }

    CLI::App *sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    Handler handler;
    for (const auto &[name, help, fn] : commands) {
        if (command == name) {
            handler = fn;
        }
    }

    std::optional<Scenario> scenario;
    std::string digest;
    fs::path dir;
    try {
        scenario = load_with_overrides(o);
        try {
            scenario->validate();
        } catch (const DomainError &e) {
            throw ConfigError(o.scenario, "", e.what());
        }
        digest = scenario_digest(*scenario);
        dir = output_dir(o);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw ConfigError(dir.string(), "", "output directory cannot be created");
        }
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "config error: " << o.scenario << ": " << e.what() << "\n";
        return kExitConfig;
    }

    Context ctx{*scenario, digest, out, {}};
    int code = kExitOk;
    try {
        for (const auto &w : scenario->source.warnings(scenario->preparation.delta_tau_ns)) {
            err << "warning: " << w << "\n";
        }
        handler(ctx);
        for (const auto &f : ctx.files) {
            write_text_file(dir / f.name, f.content);
            out << "wrote " << (dir / f.name).string() << "\n";
        }
    } catch (const DomainError &e) {
        err << "numeric error: " << e.what() << "\n";
        code = kExitNumeric;
    } catch (const SolverError &e) {
        err << "numeric error: " << e.what() << "\n";
        code = kExitNumeric;
    } catch (const std::exception &e) {
        err << "output error: " << e.what() << "\n";
        code = kExitConfig;
    }
    append_run_log(dir, command, o, *scenario, digest, code);
    return code;
}

}  // namespace dfgqi
