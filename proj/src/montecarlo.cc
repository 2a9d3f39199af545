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

#include "dfgqi/montecarlo.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "dfgqi/conversion.h"
#include "dfgqi/errors.h"

namespace dfgqi {

CounterRng point_stream(std::uint64_t seed, double point_value, Stream purpose) {
    return CounterRng(derive_stream(seed, value_label(point_value), static_cast<std::uint64_t>(purpose)));
}

namespace {

std::vector<std::uint64_t> uniform_sorted_indices(std::uint64_t k, std::uint64_t pulses, CounterRng &rng) {
    std::vector<std::uint64_t> idx;
    if (k == 0) {
        return idx;
    }
    if (pulses == 0) {
        throw DomainError("cannot place photons in zero pulses");
    }
    idx.reserve(k);
    std::uniform_int_distribution<std::uint64_t> pick(0, pulses - 1);
    for (std::uint64_t i = 0; i < k; ++i) {
        idx.push_back(pick(rng));
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::uint64_t poisson(double mean, CounterRng &rng) {
    if (!(mean > 0)) {
        return 0;
    }
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

}  // namespace

std::vector<std::uint64_t> sample_photon_pulses(std::uint64_t pulses, double mean, CounterRng &rng) {
    if (!(mean >= 0)) {
        throw DomainError(fmt::format("mean photon number must be >= 0, got {}", mean));
    }
    const auto k = poisson(static_cast<double>(pulses) * mean, rng);
    return uniform_sorted_indices(k, pulses, rng);
}

std::vector<std::uint64_t> occupancy_from_indices(std::span<const std::uint64_t> sorted_indices,
                                                  std::uint64_t pulses) {
    std::vector<std::uint64_t> occ(1, 0);
    std::uint64_t occupied = 0;
    for (std::size_t i = 0; i < sorted_indices.size();) {
        std::size_t j = i;
        while (j < sorted_indices.size() && sorted_indices[j] == sorted_indices[i]) {
            ++j;
        }
        const std::size_t n = j - i;
        if (occ.size() <= n) {
            occ.resize(n + 1, 0);
        }
        ++occ[n];
        ++occupied;
        i = j;
    }
    occ[0] = pulses - occupied;
    return occ;
}

std::vector<std::uint64_t> photon_number_histogram(double mean, std::uint64_t pulses, CounterRng &rng) {
    const auto idx = sample_photon_pulses(pulses, mean, rng);
    return occupancy_from_indices(idx, pulses);
}

double pump_phase_walk(double delta_tau_ns, double coherence_time_ns, int steps, CounterRng &rng) {
    if (!(coherence_time_ns > 0)) {
        throw DomainError(fmt::format("pump coherence time must be positive, got {} ns", coherence_time_ns));
    }
    if (std::isinf(coherence_time_ns)) {
        return 0.0;
    }
    if (steps < 1) {
        throw DomainError("phase walk needs at least one step");
    }
    const double dt = delta_tau_ns / steps;
    std::normal_distribution<double> step(0.0, std::sqrt(2.0 * dt / coherence_time_ns));
    double phase = 0.0;
    for (int i = 0; i < steps; ++i) {
        phase += step(rng);
    }
    return phase;
}

double RunResult::eta_qi_realized() const {
    return photons_in > 0 ? static_cast<double>(photons_out) / static_cast<double>(photons_in) : 0.0;
}

double RunResult::mean_background() const {
    if (fringe.empty()) {
        return 0.0;
    }
    double b = 0.0;
    for (const auto &p : fringe) {
        b += static_cast<double>(p.background);
    }
    return b / static_cast<double>(fringe.size());
}

std::vector<FringeSample> RunResult::samples() const {
    std::vector<FringeSample> out;
    out.reserve(fringe.size());
    for (const auto &p : fringe) {
        out.push_back({p.phase_rad, static_cast<double>(p.counts)});
    }
    return out;
}

bool same_outcome(const RunResult &a, const RunResult &b) {
    return a.histogram == b.histogram && a.fringe == b.fringe && a.photons_in == b.photons_in &&
           a.photons_out == b.photons_out && a.occupancy == b.occupancy && a.metadata.seed == b.metadata.seed &&
           a.metadata.scenario_digest == b.metadata.scenario_digest &&
           a.metadata.pulses_per_point == b.metadata.pulses_per_point && a.metadata.version == b.metadata.version;
}

namespace {

// Scenario quantities shared by the analytic and stochastic paths.
struct Setup {
    TimeBinQubit qubit;  // normalized, coherence 1
    double prep_fraction = 0;
    double p_conv = 0;  // per source photon, prepared and leaving the interface
    double cw_survival = 0;
    double cw_source_hz = 0;
    double noise_hz = 0;
    double period_ns = 0;
    double rate_hz = 0;
    PeakShape shape;
};

Setup make_setup(const Scenario &s) {
    Setup u;
    TimeBinQubit q = prepare_qubit(s.preparation);
    u.prep_fraction = q.norm();
    if (u.prep_fraction > 0) {
        const double k = 1.0 / std::sqrt(u.prep_fraction);
        q.early *= k;
        q.late *= k;
    }
    u.qubit = q;
    const double eta = s.eta_qi();
    u.p_conv = std::min(1.0, u.prep_fraction * eta);
    const double fwd = s.analysis.splitting_ratio * (1.0 - s.analysis.splitting_ratio) * s.analysis.transmission;
    u.cw_survival = std::min(1.0, u.prep_fraction * eta * 2.0 * fwd);
    u.rate_hz = s.source.repetition_rate_mhz * 1e6;
    u.cw_source_hz = s.source.cw_fraction * s.source.mean_photon_number * u.rate_hz;
    u.noise_hz = noise_rate(s.noise, s.pump, s.output_wavelength_um());
    u.period_ns = s.source.period_ns();
    u.shape = s.peak_shape();
    return u;
}

Interferometer analysis_at(const Scenario &s, double beta) {
    Interferometer a = s.analysis;
    a.phase_rad = beta;
    return a;
}

double shape_offset(const PeakShape &shape, CounterRng &rng) {
    if (shape.pulse_fwhm_ns <= 0) {
        return 0.0;
    }
    if (shape.square_pulse) {
        return (rng.uniform() - 0.5) * shape.pulse_fwhm_ns;
    }
    return std::normal_distribution<double>(0.0, shape.pulse_fwhm_ns / kFwhmPerSigma)(rng);
}

void add_flat(std::vector<Arrival> &out, double rate_hz, double duration_ns, Origin origin, CounterRng &rng) {
    const auto n = poisson(rate_hz * duration_ns * 1e-9, rng);
    for (std::uint64_t i = 0; i < n; ++i) {
        out.push_back({rng.uniform() * duration_ns, 1.0, origin});
    }
}

struct PointOutcome {
    TacHistogram histogram;
    FringePoint point;
    std::uint64_t photons_in = 0;
    std::uint64_t photons_out = 0;
    std::vector<std::uint64_t> occupancy;
};

PointOutcome simulate_point(const Scenario &s, const Setup &u, double beta) {
    const std::uint64_t pulses = s.pulses_per_point;
    const double duration_ns = static_cast<double>(pulses) * u.period_ns;
    auto rng_source = point_stream(s.seed, beta, Stream::source);
    auto rng_conv = point_stream(s.seed, beta, Stream::conversion);
    auto rng_walk = point_stream(s.seed, beta, Stream::pump_walk);
    auto rng_slot = point_stream(s.seed, beta, Stream::slot);
    auto rng_shape = point_stream(s.seed, beta, Stream::pulse_shape);
    auto rng_cw = point_stream(s.seed, beta, Stream::cw);
    auto rng_noise = point_stream(s.seed, beta, Stream::noise);
    auto rng_det = point_stream(s.seed, beta, Stream::detector);

    PointOutcome out;
    out.photons_in = poisson(static_cast<double>(pulses) * s.source.mean_photon_number, rng_source);
    out.photons_out =
        out.photons_in > 0 && u.p_conv > 0
            ? std::binomial_distribution<std::uint64_t>(out.photons_in, u.p_conv)(rng_conv)
            : 0;
    const auto idx = uniform_sorted_indices(out.photons_out, pulses, rng_conv);
    out.occupancy = occupancy_from_indices(idx, pulses);

    const Interferometer analysis = analysis_at(s, beta);
    const double dtau = s.preparation.delta_tau_ns;
    std::vector<Arrival> arrivals;
    arrivals.reserve(idx.size() / 2 + 16);
    for (std::size_t i = 0; i < idx.size();) {
        const double delta = pump_phase_walk(dtau, s.pump.coherence_time_ns, s.phase_walk_steps, rng_walk);
        const SlotProbabilities sp = analyze(shift_late_phase(u.qubit, delta), analysis, s.tac_offset_ns);
        const double base = static_cast<double>(idx[i]) * u.period_ns;
        std::size_t j = i;
        for (; j < idx.size() && idx[j] == idx[i]; ++j) {
            double x = rng_slot.uniform();
            for (const auto &slot : sp.slots) {
                if (x < slot.probability) {
                    arrivals.push_back({base + slot.time_ns + shape_offset(u.shape, rng_shape), 1.0, Origin::signal});
                    break;
                }
                x -= slot.probability;
            }
        }
        i = j;
    }
    add_flat(arrivals, u.cw_source_hz * u.cw_survival, duration_ns, Origin::cw, rng_cw);
    add_flat(arrivals, u.noise_hz, duration_ns, Origin::noise, rng_noise);
    std::stable_sort(arrivals.begin(), arrivals.end(),
                     [](const Arrival &a, const Arrival &b) { return a.time_ns < b.time_ns; });

    const auto dets = simulate_detection(arrivals, s.detector, duration_ns, rng_det);
    out.histogram = build_histogram(dets, u.period_ns, s.bin_width_ps, 0.0, pulses);
    const auto sca = sca_counts(dets, u.period_ns, 0.0, s.sca, s.analysis.delta_tau_ns, u.shape);

    std::uint64_t background = 0;
    const double half = 0.5 * s.sca.width_ns;
    for (const auto &d : dets) {
        if (d.origin != Origin::signal && std::abs(tac_time(d.time_ns, u.period_ns, 0.0) - s.sca.center_ns) <= half) {
            ++background;
        }
    }
    out.point = {beta, sca.counts, std::sqrt(static_cast<double>(sca.counts)), background, sca.leakage_fraction};
    return out;
}

// Runs fn(i) for i in [0, n) on a small worker pool; rethrows the lowest-index failure.
template <typename F>
void parallel_for(std::size_t n, F &&fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

template <typename F>
auto with_point_context(std::size_t i, const char *what, double value, F &&f) {
    try {
        return f();
    } catch (const DomainError &e) {
        throw DomainError(fmt::format("{} point {} ({}): {}", what, i, value, e.what()));
    } catch (const SolverError &e) {
        throw SolverError(fmt::format("{} point {} ({}): {}", what, i, value, e.what()));
    }
}

RunResult run_points(const Scenario &s, std::span<const double> phases) {
    const auto t0 = std::chrono::steady_clock::now();
    s.validate();
    const Setup u = make_setup(s);
    std::vector<PointOutcome> outcomes(phases.size());
    parallel_for(phases.size(), [&](std::size_t i) {
        outcomes[i] = with_point_context(i, "phase", phases[i], [&] { return simulate_point(s, u, phases[i]); });
    });

    RunResult r;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto &o = outcomes[i];
        if (i == 0) {
            r.histogram = o.histogram;
        } else {
            r.histogram.merge(o.histogram);
        }
        r.fringe.push_back(o.point);
        r.photons_in += o.photons_in;
        r.photons_out += o.photons_out;
        if (r.occupancy.size() < o.occupancy.size()) {
            r.occupancy.resize(o.occupancy.size(), 0);
        }
        for (std::size_t k = 0; k < o.occupancy.size(); ++k) {
            r.occupancy[k] += o.occupancy[k];
        }
    }
    r.metadata.seed = s.seed;
    r.metadata.scenario_digest = scenario_digest(s);
    r.metadata.pulses_per_point = s.pulses_per_point;
    r.metadata.version = DFGQI_VERSION;
    r.metadata.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace

RunResult run_fringe_scan(const Scenario &s, std::span<const double> phases_rad) {
    if (phases_rad.size() < 2) {
        throw DomainError(fmt::format("a fringe scan needs at least 2 phase points, got {}", phases_rad.size()));
    }
    return run_points(s, phases_rad);
}

RunResult run_histogram(const Scenario &s) {
    const double beta = s.analysis.phase_rad;
    return run_points(s, std::span<const double>(&beta, 1));
}

std::vector<EfficiencyRow> run_efficiency_sweep(const Scenario &s, std::span<const double> powers_w) {
    s.validate();
    for (double p : powers_w) {
        if (!(p >= 0)) {
            throw DomainError(fmt::format("pump powers must be >= 0, got {} W", p));
        }
    }
    const double qe = s.detector.efficiency;
    if (!(qe > 0)) {
        throw DomainError("efficiency sweep needs a detector efficiency above 0");
    }
    const double flux_in = photon_flux(s.signal_power_w, s.signal_wavelength_um);
    if (!(flux_in > 0)) {
        throw DomainError("efficiency sweep needs a positive signal power");
    }
    const double duration_ns = s.sweep_duration_s * 1e9;
    const double tau_s = s.detector.dead_time_us * 1e-6;

    std::vector<EfficiencyRow> rows(powers_w.size());
    parallel_for(powers_w.size(), [&](std::size_t i) {
        rows[i] = with_point_context(i, "power", powers_w[i], [&] {
            const double power = powers_w[i];
            Scenario at = s;
            at.pump.power_w = power;
            EfficiencyRow row{};
            row.power_w = power;
            row.eta_analytic = at.eta_qi();
            const double converted_hz = flux_in * row.eta_analytic;
            const double noise_hz = noise_rate(at.noise, at.pump, at.output_wavelength_um());
            const double detectable = (converted_hz + noise_hz) * qe;
            row.attenuation_db =
                detectable > s.sweep_target_rate_hz ? 10.0 * std::log10(detectable / s.sweep_target_rate_hz) : 0.0;
            const double att = std::pow(10.0, -row.attenuation_db / 10.0);

            auto rng_src = point_stream(s.seed, power, Stream::source);
            auto rng_det = point_stream(s.seed, power, Stream::detector);
            auto rng_dark = point_stream(s.seed, power, Stream::dark_run);
            std::vector<Arrival> arrivals;
            add_flat(arrivals, converted_hz * att, duration_ns, Origin::signal, rng_src);
            add_flat(arrivals, noise_hz * att, duration_ns, Origin::noise, rng_src);
            std::stable_sort(arrivals.begin(), arrivals.end(),
                             [](const Arrival &a, const Arrival &b) { return a.time_ns < b.time_ns; });
            const auto n_obs = simulate_detection(arrivals, s.detector, duration_ns, rng_det).size();
            const auto n_dark = simulate_detection({}, s.detector, duration_ns, rng_dark).size();

            const double t = s.sweep_duration_s;
            const double r_obs = static_cast<double>(n_obs) / t;
            const double r_dark = static_cast<double>(n_dark) / t;
            const double net = dead_time_correct(r_obs, s.detector.dead_time_us) -
                               dead_time_correct(r_dark, s.detector.dead_time_us);
            const double scale = 1.0 / (qe * att * flux_in);
            auto sigma = [&](std::size_t n, double r) {
                const double g = 1.0 - r * tau_s;
                return std::sqrt(static_cast<double>(n)) / t / (g * g);
            };
            row.eta_mc = net * scale;
            row.stat_error = std::hypot(sigma(n_obs, r_obs), sigma(n_dark, r_dark)) * scale;
            return row;
        });
    });
    return rows;
}

namespace {

// Window counts before dead time for `pulses` pulses at coherence factor c.
ScaExpectation expected_raw(const Scenario &s, const Setup &u, double beta, double coherence, double pulses) {
    const TimeBinQubit q = apply_conversion_phase(u.qubit, coherence);
    const SlotProbabilities sp = analyze(q, analysis_at(s, beta), s.tac_offset_ns);
    const double lo = s.sca.center_ns - 0.5 * s.sca.width_ns;
    const double hi = s.sca.center_ns + 0.5 * s.sca.width_ns;
    const double qe = s.detector.efficiency;
    const double per_pulse = s.source.mean_photon_number * u.p_conv * qe;
    ScaExpectation e;
    for (const auto &slot : sp.slots) {
        e.signal += pulses * per_pulse * slot.probability * u.shape.fraction_in(lo, hi, slot.time_ns);
    }
    const double window_s = pulses * s.sca.width_ns * 1e-9;
    e.cw = u.cw_source_hz * u.cw_survival * qe * window_s;
    e.dark = s.detector.dark_count_rate_hz * window_s;
    e.noise = u.noise_hz * qe * window_s;
    const double rate = per_pulse * sp.forward() * u.rate_hz + u.cw_source_hz * u.cw_survival * qe +
                        s.detector.dark_count_rate_hz + u.noise_hz * qe;
    e.dead_time_factor = 1.0 / (1.0 + rate * s.detector.dead_time_us * 1e-6);
    return e;
}

double coherence_of(const Scenario &s) {
    return pump_coherence_visibility_factor(s.pump.coherence_time_ns, s.preparation.delta_tau_ns);
}

}  // namespace

ScaExpectation expected_sca_counts(const Scenario &s, double beta_rad) {
    s.validate();
    const Setup u = make_setup(s);
    ScaExpectation e =
        expected_raw(s, u, beta_rad, coherence_of(s), static_cast<double>(s.pulses_per_point));
    e.signal *= e.dead_time_factor;
    e.cw *= e.dead_time_factor;
    e.dark *= e.dead_time_factor;
    e.noise *= e.dead_time_factor;
    return e;
}

namespace {

struct FringeSummary {
    double peak_signal;  // at beta = alpha, before dead time
    double mean;         // A
    double amplitude;    // C
    double phase0_rad;
    double background;   // B
    double signal;       // S = 2 (A - B)
    double v_net;
};

inline constexpr int kSummaryPoints = 24;
// Large enough that the fit's unit variance floor never applies.
inline constexpr double kSummaryScale = 1e12;

// The dead-time weighted SCA fringe over one period, per pulse, reduced by
// the same sinusoid fit that is applied to simulated counts.
FringeSummary summarize(const Scenario &s) {
    const Setup u = make_setup(s);
    const double alpha = s.preparation.phase_rad;
    const double c = coherence_of(s);
    FringeSummary f{};
    std::vector<FringeSample> curve;
    double background = 0.0;
    for (int k = 0; k < kSummaryPoints; ++k) {
        const double beta = alpha + 2.0 * std::numbers::pi * k / kSummaryPoints;
        const auto e = expected_raw(s, u, beta, c, 1.0);
        if (k == 0) {
            f.peak_signal = e.signal;
        }
        curve.push_back({beta, kSummaryScale * e.total() * e.dead_time_factor});
        background += e.background() * e.dead_time_factor / kSummaryPoints;
        f.mean += e.total() * e.dead_time_factor / kSummaryPoints;
    }
    f.background = background;
    if (!(f.mean > background)) {
        return f;
    }
    const auto fit =
        extract_visibility(curve, kSummaryScale * background, std::numeric_limits<double>::infinity());
    f.mean = fit.mean / kSummaryScale;
    f.amplitude = fit.amplitude / kSummaryScale;
    f.phase0_rad = fit.phase0_rad;
    f.signal = 2.0 * (f.mean - f.background);
    f.v_net = fit.v_net;
    return f;
}

double coherence_time_for(double factor, double delta_tau_ns) {
    return factor >= 1.0 ? kInfinity : -delta_tau_ns / std::log(factor);
}

}  // namespace

FringeOracle scenario_fringe_oracle(const Scenario &s) {
    s.validate();
    const auto f = summarize(s);
    const double n = static_cast<double>(s.pulses_per_point);
    FringeOracle o;
    o.signal_scale = n * f.signal;
    o.v_net = f.v_net;
    o.background = n * f.background;
    o.alpha_rad = f.phase0_rad;
    return o;
}

void apply_calibration(Scenario &s) {
    const Calibration &cal = s.calibration;
    if (!cal.net_visibility && !cal.cw_share_of_peak && !cal.background_to_signal) {
        return;
    }
    const double dtau = s.preparation.delta_tau_ns;
    // Start from a fixed state so the result does not depend on the values being replaced.
    double coherence = 1.0;
    if (cal.net_visibility) {
        s.pump.coherence_time_ns = kInfinity;
    }
    if (cal.cw_share_of_peak) {
        s.source.cw_fraction = 0.0;
    }
    if (cal.background_to_signal) {
        s.detector.dark_count_rate_hz = 0.0;
    }
    if (cal.net_visibility && !(*cal.net_visibility > 0 && *cal.net_visibility <= 1)) {
        throw DomainError(fmt::format("net visibility must lie in (0, 1], got {}", *cal.net_visibility));
    }
    if (cal.cw_share_of_peak && !(*cal.cw_share_of_peak >= 0)) {
        throw DomainError(fmt::format("cw share of peak must be >= 0, got {}", *cal.cw_share_of_peak));
    }
    if (cal.background_to_signal && !(*cal.background_to_signal >= 0)) {
        throw DomainError(fmt::format("background/signal must be >= 0, got {}", *cal.background_to_signal));
    }

    // The three targets couple only through the dead-time factor; a few sweeps converge.
    constexpr int kSweeps = 40;
    for (int sweep = 0; sweep < kSweeps; ++sweep) {
        if (cal.net_visibility) {
            const double v = summarize(s).v_net;
            if (!(v > 0)) {
                throw DomainError("scenario has no interference to calibrate");
            }
            const double limit = v / coherence;
            coherence *= *cal.net_visibility / v;
            if (coherence > 1.0 + 1e-12) {
                throw DomainError(fmt::format("net visibility {} is not reachable: the coherent limit is {:.6f}",
                                              *cal.net_visibility, limit));
            }
            coherence = std::min(coherence, 1.0);
            s.pump.coherence_time_ns = coherence_time_for(coherence, dtau);
        }
        if (cal.cw_share_of_peak) {
            Scenario unit = s;
            unit.source.cw_fraction = 1.0;
            const Setup su = make_setup(unit);
            const double per_fraction =
                expected_raw(unit, su, s.preparation.phase_rad, coherence_of(s), 1.0).cw;
            const double peak = summarize(s).peak_signal;
            if (*cal.cw_share_of_peak > 0 && !(per_fraction > 0)) {
                throw DomainError("cw share requested but no cw light reaches the detector");
            }
            s.source.cw_fraction = *cal.cw_share_of_peak > 0 ? *cal.cw_share_of_peak * peak / per_fraction : 0.0;
        }
        if (cal.background_to_signal) {
            const double ratio = *cal.background_to_signal;
            auto excess = [&](double dark_hz) {
                Scenario t = s;
                t.detector.dark_count_rate_hz = dark_hz;
                const auto f = summarize(t);
                return f.background - ratio * f.signal;
            };
            if (excess(0.0) > 0) {
                throw DomainError(fmt::format(
                    "background/signal {} is below the cw and noise contribution alone", ratio));
            }
            double lo = 0.0;
            double hi = 1e3;
            while (excess(hi) < 0) {
                hi *= 4;
                if (hi > 1e15) {
                    throw DomainError(fmt::format("background/signal {} cannot be reached with dark counts", ratio));
                }
            }
            for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
                const double mid = 0.5 * (lo + hi);
                (excess(mid) < 0 ? lo : hi) = mid;
            }
            s.detector.dark_count_rate_hz = 0.5 * (lo + hi);
        }
        if (s.detector.dead_time_us == 0 && sweep >= 1) {
            break;
        }
    }
}

OracleReport validate_against_oracle(const RunResult &result, const std::function<double(double)> &expected) {
    OracleReport rep;
    for (const auto &p : result.fringe) {
        const double e = expected(p.phase_rad);
        if (!(e > 0)) {
            continue;
        }
        const double obs = static_cast<double>(p.counts);
        const double z = (obs - e) / std::sqrt(e);
        const bool flag = std::abs(z) > kOracleFlagSigma;
        rep.rows.push_back({p.phase_rad, obs, e, z, flag});
        rep.chi2 += z * z;
        rep.flagged += flag ? 1 : 0;
    }
    rep.dof = rep.rows.size();
    if (rep.dof > 0) {
        rep.chi2_per_dof = rep.chi2 / static_cast<double>(rep.dof);
    }
    return rep;
}

OracleReport validate_against_oracle(const Scenario &s, std::span<const double> phases_rad) {
    const RunResult r = run_points(s, phases_rad);
    return validate_against_oracle(r, [&](double beta) { return expected_sca_counts(s, beta).total(); });
}

}  // namespace dfgqi
