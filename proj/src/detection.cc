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

#include "dfgqi/detection.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

#include <fmt/format.h>

#include "dfgqi/errors.h"

namespace dfgqi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
}

// Antiderivative of Phi(x / sigma).
double integrated_cdf(double x, double sigma) {
    return x * normal_cdf(x / sigma) + sigma * normal_pdf(x / sigma);
}

using Mat3 = std::array<std::array<double, 3>, 3>;

bool invert3(const Mat3 &m, Mat3 &inv) {
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    const double scale = std::abs(m[0][0] * m[1][1] * m[2][2]);
    if (!(std::abs(det) > 1e-12 * scale)) {
        return false;
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
            const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
            inv[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / det;
        }
    }
    return true;
}

}  // namespace

void DetectorModel::validate() const {
    if (!(efficiency >= 0 && efficiency <= 1)) {
        throw DomainError(fmt::format("detector efficiency must lie in [0, 1], got {}", efficiency));
    }
    if (!(dark_count_rate_hz >= 0)) {
        throw DomainError(fmt::format("dark count rate must be >= 0, got {} Hz", dark_count_rate_hz));
    }
    if (!(dead_time_us >= 0)) {
        throw DomainError(fmt::format("dead time must be >= 0, got {} us", dead_time_us));
    }
    if (!(jitter_fwhm_ps >= 0)) {
        throw DomainError(fmt::format("jitter must be >= 0, got {} ps", jitter_fwhm_ps));
    }
    if (!(afterpulse_probability >= 0 && afterpulse_probability <= 1)) {
        throw DomainError(fmt::format("afterpulse probability must lie in [0, 1], got {}",
                                      afterpulse_probability));
    }
    if (!(afterpulse_decay_us > 0)) {
        throw DomainError(fmt::format("afterpulse decay must be positive, got {} us", afterpulse_decay_us));
    }
}

double dead_time_correct(double observed_hz, double dead_time_us) {
    if (!(observed_hz >= 0) || !(dead_time_us >= 0)) {
        throw DomainError(fmt::format("dead-time correction needs R >= 0 and tau >= 0, got {} Hz, {} us",
                                      observed_hz, dead_time_us));
    }
    const double occupancy = observed_hz * dead_time_us * 1e-6;
    if (!(occupancy < 1)) {
        throw DomainError(fmt::format(
            "observed rate {} Hz with dead time {} us saturates the detector (R tau = {:.3f} >= 1)",
            observed_hz, dead_time_us, occupancy));
    }
    return observed_hz / (1.0 - occupancy);
}

double dead_time_thin(double true_hz, double dead_time_us) {
    if (!(true_hz >= 0) || !(dead_time_us >= 0)) {
        throw DomainError("dead-time thinning needs R >= 0 and tau >= 0");
    }
    return true_hz / (1.0 + true_hz * dead_time_us * 1e-6);
}

double unfold_photon_rate(double observed_hz, double dark_observed_hz, const DetectorModel &det,
                          double attenuation_db) {
    det.validate();
    if (!(attenuation_db >= 0)) {
        throw DomainError(fmt::format("attenuation must be given as a positive loss in dB, got {}", attenuation_db));
    }
    if (!(det.efficiency > 0)) {
        throw DomainError("cannot unfold through a detector with zero efficiency");
    }
    const double net = dead_time_correct(observed_hz, det.dead_time_us) -
                       dead_time_correct(dark_observed_hz, det.dead_time_us);
    if (net < 0) {
        throw SolverError(fmt::format(
            "dark counts dominate: corrected signal minus corrected dark is {:.6g} Hz", net));
    }
    return net / det.efficiency * std::pow(10.0, attenuation_db / 10.0);
}

std::vector<Detection> simulate_detection(std::span<const Arrival> arrivals, const DetectorModel &det,
                                          double duration_ns, CounterRng &rng, double start_ns) {
    det.validate();
    if (!(duration_ns >= 0)) {
        throw DomainError(fmt::format("duration must be >= 0, got {} ns", duration_ns));
    }
    for (std::size_t i = 1; i < arrivals.size(); ++i) {
        if (arrivals[i].time_ns < arrivals[i - 1].time_ns) {
            throw DomainError(fmt::format("arrivals are not time sorted at index {}", i));
        }
    }

    std::vector<Detection> candidates;
    candidates.reserve(arrivals.size() / 4 + 16);
    for (const auto &a : arrivals) {
        const double p = det.efficiency * a.survival;
        if (p >= 1.0 || (p > 0.0 && rng.uniform() < p)) {
            candidates.push_back({a.time_ns, a.origin});
        }
    }

    std::vector<Detection> dark;
    const double end_ns = start_ns + duration_ns;
    if (det.dark_count_rate_hz > 0 && duration_ns > 0) {
        std::exponential_distribution<double> gap(det.dark_count_rate_hz * 1e-9);
        for (double t = start_ns + gap(rng); t < end_ns; t += gap(rng)) {
            dark.push_back({t, Origin::dark});
        }
    }
    std::vector<Detection> merged;
    merged.reserve(candidates.size() + dark.size());
    std::merge(candidates.begin(), candidates.end(), dark.begin(), dark.end(), std::back_inserter(merged),
               [](const Detection &a, const Detection &b) { return a.time_ns < b.time_ns; });

    const double dead_ns = det.dead_time_us * 1e3;
    std::exponential_distribution<double> afterpulse_delay(1.0 / (det.afterpulse_decay_us * 1e3));
    std::priority_queue<double, std::vector<double>, std::greater<>> pending;
    std::vector<Detection> accepted;
    accepted.reserve(merged.size());
    double blocked_until = -std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    while (next < merged.size() || !pending.empty()) {
        Detection ev;
        if (!pending.empty() && (next == merged.size() || pending.top() <= merged[next].time_ns)) {
            ev = {pending.top(), Origin::afterpulse};
            pending.pop();
        } else {
            ev = merged[next++];
        }
        if (ev.time_ns < blocked_until) {
            continue;
        }
        accepted.push_back(ev);
        blocked_until = ev.time_ns + dead_ns;
        if (det.afterpulse_probability > 0 && rng.uniform() < det.afterpulse_probability) {
            const double t = blocked_until + afterpulse_delay(rng);
            if (t < end_ns) {
                pending.push(t);
            }
        }
    }

    if (det.jitter_fwhm_ps > 0) {
        std::normal_distribution<double> jitter(0.0, det.jitter_fwhm_ps * 1e-3 / kFwhmPerSigma);
        for (auto &d : accepted) {
            d.time_ns += jitter(rng);
        }
        std::stable_sort(accepted.begin(), accepted.end(),
                         [](const Detection &a, const Detection &b) { return a.time_ns < b.time_ns; });
    }
    return accepted;
}

std::uint64_t TacHistogram::total() const {
    std::uint64_t n = 0;
    for (auto c : counts) {
        n += c;
    }
    return n;
}

double TacHistogram::bin_start_ns(std::size_t i) const {
    return origin_ns + static_cast<double>(i) * bin_width_ps * 1e-3;
}

double TacHistogram::bin_end_ns(std::size_t i) const {
    return std::min(bin_start_ns(i + 1), origin_ns + period_ns);
}

double TacHistogram::bin_center_ns(std::size_t i) const {
    return 0.5 * (bin_start_ns(i) + bin_end_ns(i));
}

void TacHistogram::merge(const TacHistogram &other) {
    if (bin_width_ps != other.bin_width_ps || origin_ns != other.origin_ns || period_ns != other.period_ns ||
        counts.size() != other.counts.size()) {
        throw DomainError("cannot merge histograms with different binning");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        counts[i] += other.counts[i];
    }
    sync_pulses += other.sync_pulses;
}

double tac_time(double t_ns, double period_ns, double origin_ns) {
    double x = std::fmod(t_ns - origin_ns, period_ns);
    if (x < 0) {
        x += period_ns;
    }
    return x >= period_ns ? 0.0 : x;
}

TacHistogram build_histogram(std::span<const Detection> detections, double period_ns, double bin_width_ps,
                             double origin_ns, std::uint64_t sync_pulses) {
    if (!(period_ns > 0)) {
        throw DomainError(fmt::format("sync period must be positive, got {} ns", period_ns));
    }
    if (!(bin_width_ps > 0)) {
        throw DomainError(fmt::format("bin width must be positive, got {} ps", bin_width_ps));
    }
    TacHistogram h;
    h.bin_width_ps = bin_width_ps;
    h.origin_ns = origin_ns;
    h.period_ns = period_ns;
    h.sync_pulses = sync_pulses;
    const double bw_ns = bin_width_ps * 1e-3;
    const auto nbins = static_cast<std::size_t>(std::ceil(period_ns / bw_ns - 1e-9));
    h.counts.assign(std::max<std::size_t>(nbins, 1), 0);
    for (const auto &d : detections) {
        const double x = tac_time(d.time_ns, period_ns, origin_ns);
        const auto bin = static_cast<std::size_t>(x / bw_ns);
        h.counts[std::min(bin, h.counts.size() - 1)] += 1;
    }
    return h;
}

double peak_fwhm(const TacHistogram &h, double seed_ns, double search_half_width_ns) {
    if (h.counts.empty()) {
        throw SolverError("empty histogram");
    }
    std::size_t lo = h.counts.size(), hi = 0;
    std::uint64_t in_region = 0;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (std::abs(h.bin_center_ns(i) - seed_ns) <= search_half_width_ns) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
            in_region += h.counts[i];
        }
    }
    if (lo > hi || in_region < 100) {
        throw SolverError(fmt::format(
            "peak near {} ns has {} counts within +-{} ns; at least 100 are needed", seed_ns, in_region,
            search_half_width_ns));
    }
    std::size_t top = lo;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (h.counts[i] > h.counts[top]) {
            top = i;
        }
    }
    const std::size_t nb = h.counts.size();
    auto raw = [&](std::size_t i) { return static_cast<double>(h.counts[i]); };
    auto half_width = [&](double half, auto &&value, std::size_t from) -> std::pair<std::size_t, std::size_t> {
        std::size_t l = from;
        while (l > 0 && value(l - 1) >= half) {
            --l;
        }
        std::size_t r = from;
        while (r + 1 < nb && value(r + 1) >= half) {
            ++r;
        }
        if (l == 0 || r + 1 == nb) {
            throw SolverError(fmt::format(
                "peak near {} ns does not fall below half maximum inside the histogram", seed_ns));
        }
        return {l, r};
    };
    auto width_from = [&](double half, auto &&value, std::size_t l, std::size_t r) {
        auto crossing = [&](std::size_t inside, std::size_t outside) {
            const double ci = value(inside), co = value(outside);
            const double xi = h.bin_center_ns(inside), xo = h.bin_center_ns(outside);
            return xi + (ci - half) / (ci - co) * (xo - xi);
        };
        return crossing(r, r + 1) - crossing(l, l - 1);
    };

    const auto [l0, r0] = half_width(0.5 * raw(top), raw, top);
    const std::size_t span = r0 - l0 + 1;
    if (span < 10) {
        return width_from(0.5 * raw(top), raw, l0, r0);
    }

    // Wide peak: the maximum bin overestimates the height under Poisson noise.
    // Take the height from a parabola through the top fifth and the crossings
    // from a short moving average.
    const std::size_t k = std::max<std::size_t>(1, span / 5);
    Mat3 ata{};
    std::array<double, 3> aty{0, 0, 0};
    const std::size_t a0 = top > k ? top - k : 0;
    const std::size_t a1 = std::min(nb - 1, top + k);
    for (std::size_t i = a0; i <= a1; ++i) {
        const double x = static_cast<double>(i) - static_cast<double>(top);
        const std::array<double, 3> row{1.0, x, x * x};
        for (int u = 0; u < 3; ++u) {
            aty[u] += row[u] * raw(i);
            for (int v = 0; v < 3; ++v) {
                ata[u][v] += row[u] * row[v];
            }
        }
    }
    Mat3 ainv{};
    double height = raw(top);
    if (invert3(ata, ainv)) {
        std::array<double, 3> c{0, 0, 0};
        for (int u = 0; u < 3; ++u) {
            for (int v = 0; v < 3; ++v) {
                c[u] += ainv[u][v] * aty[v];
            }
        }
        if (c[2] < 0) {
            const double xv = -c[1] / (2 * c[2]);
            if (std::abs(xv) <= static_cast<double>(k)) {
                height = c[0] + c[1] * xv + c[2] * xv * xv;
            }
        }
    }
    const std::size_t m = std::max<std::size_t>(1, span / 20);
    auto smooth = [&](std::size_t i) {
        const std::size_t b0 = i > m ? i - m : 0;
        const std::size_t b1 = std::min(nb - 1, i + m);
        double acc = 0;
        for (std::size_t j = b0; j <= b1; ++j) {
            acc += raw(j);
        }
        return acc / static_cast<double>(b1 - b0 + 1);
    };
    const double half = 0.5 * height;
    const auto [l1, r1] = half_width(half, smooth, top);
    return width_from(half, smooth, l1, r1);
}

void ScaWindow::validate() const {
    if (!(width_ns > 0)) {
        throw DomainError(fmt::format("SCA window width must be positive, got {} ns", width_ns));
    }
}

double PeakShape::fraction_in(double lo_ns, double hi_ns, double center_ns) const {
    if (!(hi_ns > lo_ns)) {
        return 0.0;
    }
    const double a = lo_ns - center_ns;
    const double b = hi_ns - center_ns;
    if (!square_pulse) {
        const double sigma_pulse = pulse_fwhm_ns / kFwhmPerSigma;
        const double sigma = std::hypot(sigma_pulse, jitter_sigma_ns);
        if (sigma == 0.0) {
            return (a <= 0.0 && 0.0 <= b) ? 1.0 : 0.0;
        }
        return normal_cdf(b / sigma) - normal_cdf(a / sigma);
    }
    const double w = pulse_fwhm_ns;
    if (w == 0.0) {
        PeakShape point{0.0, false, jitter_sigma_ns};
        return point.fraction_in(lo_ns, hi_ns, center_ns);
    }
    const double u1 = -0.5 * w, u2 = 0.5 * w;
    if (jitter_sigma_ns == 0.0) {
        return std::max(0.0, std::min(b, u2) - std::max(a, u1)) / w;
    }
    const double s = jitter_sigma_ns;
    const double upper = integrated_cdf(b - u1, s) - integrated_cdf(b - u2, s);
    const double lower = integrated_cdf(a - u1, s) - integrated_cdf(a - u2, s);
    return (upper - lower) / w;
}

namespace {

ScaResult sca_from_areas(std::uint64_t in_window, const std::array<double, 3> &areas, const ScaWindow &w,
                         double separation_ns, const PeakShape &shape) {
    ScaResult r;
    r.counts = in_window;
    const double lo = w.center_ns - 0.5 * w.width_ns;
    const double hi = w.center_ns + 0.5 * w.width_ns;
    const double central = areas[1] * shape.fraction_in(lo, hi, w.center_ns);
    const double side = areas[0] * shape.fraction_in(lo, hi, w.center_ns - separation_ns) +
                        areas[2] * shape.fraction_in(lo, hi, w.center_ns + separation_ns);
    r.leakage_fraction = (central + side) > 0 ? side / (central + side) : 0.0;
    return r;
}

}  // namespace

ScaResult sca_counts(std::span<const Detection> detections, double period_ns, double origin_ns,
                     const ScaWindow &window, double separation_ns, const PeakShape &shape) {
    window.validate();
    if (!(period_ns > 0)) {
        throw DomainError(fmt::format("sync period must be positive, got {} ns", period_ns));
    }
    std::uint64_t in_window = 0;
    std::array<double, 3> areas{0, 0, 0};
    const double half = 0.5 * window.width_ns;
    for (const auto &d : detections) {
        const double x = tac_time(d.time_ns, period_ns, origin_ns);
        if (std::abs(x - window.center_ns) <= half) {
            ++in_window;
        }
        for (int k = 0; k < 3; ++k) {
            const double c = window.center_ns + (k - 1) * separation_ns;
            if (std::abs(x - c) < 0.5 * separation_ns) {
                areas[k] += 1.0;
            }
        }
    }
    return sca_from_areas(in_window, areas, window, separation_ns, shape);
}

ScaResult sca_counts(const TacHistogram &h, const ScaWindow &window, double separation_ns,
                     const PeakShape &shape) {
    window.validate();
    std::uint64_t in_window = 0;
    std::array<double, 3> areas{0, 0, 0};
    const double half = 0.5 * window.width_ns;
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double x = h.bin_center_ns(i);
        if (std::abs(x - window.center_ns) <= half) {
            in_window += h.counts[i];
        }
        for (int k = 0; k < 3; ++k) {
            const double c = window.center_ns + (k - 1) * separation_ns;
            if (std::abs(x - c) < 0.5 * separation_ns) {
                areas[k] += static_cast<double>(h.counts[i]);
            }
        }
    }
    return sca_from_areas(in_window, areas, window, separation_ns, shape);
}

VisibilityFit extract_visibility(std::span<const FringeSample> samples, double background, double chi2_limit) {
    std::vector<double> distinct;
    for (const auto &s : samples) {
        if (!(s.counts >= 0)) {
            throw DomainError(fmt::format("fringe counts must be >= 0, got {}", s.counts));
        }
        double p = std::fmod(s.phase_rad, kTwoPi);
        if (p < 0) {
            p += kTwoPi;
        }
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](double q) {
            const double d = std::abs(p - q);
            return std::min(d, kTwoPi - d) < 1e-9;
        });
        if (!seen) {
            distinct.push_back(p);
        }
    }
    if (distinct.size() < 3) {
        throw DomainError(fmt::format("a sinusoid fit needs at least 3 distinct phases, got {}", distinct.size()));
    }
    if (!(background >= 0)) {
        throw DomainError(fmt::format("background must be >= 0, got {}", background));
    }

    // Poisson-weighted least squares; the weights come from the previous model,
    // starting from uniform weights.
    auto model_at = [](const std::array<double, 3> &q, double phase) {
        return q[0] + q[1] * std::cos(phase) + q[2] * std::sin(phase);
    };
    std::array<double, 3> p{0, 0, 0};
    Mat3 inv{};
    constexpr int kIterations = 4;
    for (int iter = 0; iter < kIterations; ++iter) {
        Mat3 xtwx{};
        std::array<double, 3> xtwy{0, 0, 0};
        for (const auto &s : samples) {
            const std::array<double, 3> row{1.0, std::cos(s.phase_rad), std::sin(s.phase_rad)};
            const double w = iter == 0 ? 1.0 : 1.0 / std::max(model_at(p, s.phase_rad), 1.0);
            for (int i = 0; i < 3; ++i) {
                xtwy[i] += w * row[i] * s.counts;
                for (int j = 0; j < 3; ++j) {
                    xtwx[i][j] += w * row[i] * row[j];
                }
            }
        }
        if (!invert3(xtwx, inv)) {
            throw SolverError("fringe phases do not constrain a sinusoid (singular normal equations)");
        }
        std::array<double, 3> next{0, 0, 0};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                next[i] += inv[i][j] * xtwy[j];
            }
        }
        p = next;
    }

    VisibilityFit fit;
    fit.mean = p[0];
    fit.amplitude = std::hypot(p[1], p[2]);
    fit.phase0_rad = std::atan2(p[2], p[1]);

    double chi2 = 0;
    Mat3 fisher{};
    for (const auto &s : samples) {
        const std::array<double, 3> row{1.0, std::cos(s.phase_rad), std::sin(s.phase_rad)};
        const double model = model_at(p, s.phase_rad);
        const double var = std::max(model, 1.0);
        chi2 += (s.counts - model) * (s.counts - model) / var;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                fisher[i][j] += row[i] * row[j] / var;
            }
        }
    }
    const auto dof = static_cast<double>(samples.size()) - 3.0;
    fit.chi2_per_dof = dof > 0 ? chi2 / dof : 0.0;
    if (dof > 0 && fit.chi2_per_dof > chi2_limit) {
        throw SolverError(fmt::format(
            "fringe is not sinusoidal: residual chi^2/dof = {:.3g} exceeds {:.3g}", fit.chi2_per_dof, chi2_limit));
    }
    if (!(fit.mean > background)) {
        throw SolverError(fmt::format("fitted mean {:.6g} does not exceed the background {:.6g}", fit.mean,
                                      background));
    }
    fit.v_raw = fit.amplitude / fit.mean;
    fit.v_net = fit.amplitude / (fit.mean - background);

    Mat3 cov{};
    if (!invert3(fisher, cov)) {
        throw SolverError("fringe phases do not constrain a sinusoid (singular normal equations)");
    }
    auto propagate = [&](double denom, double d_mean) {
        std::array<double, 3> g{};
        if (fit.amplitude > 0) {
            g = {d_mean, p[1] / (fit.amplitude * denom), p[2] / (fit.amplitude * denom)};
        } else {
            g = {0.0, std::numbers::sqrt2 / 2 / denom, std::numbers::sqrt2 / 2 / denom};
        }
        double v = 0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                v += g[i] * cov[i][j] * g[j];
            }
        }
        return std::sqrt(std::max(v, 0.0));
    };
    fit.sigma_v_raw = propagate(fit.mean, -fit.amplitude / (fit.mean * fit.mean));
    const double net = fit.mean - background;
    fit.sigma_v_net = propagate(net, -fit.amplitude / (net * net));
    return fit;
}

MaxMinVisibility visibility_max_min(std::span<const FringeSample> samples, double background) {
    if (samples.size() < 2) {
        throw DomainError("max/min visibility needs at least two samples");
    }
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                              [](const auto &a, const auto &b) { return a.counts < b.counts; });
    const double mx = hi->counts, mn = lo->counts;
    if (!(mx + mn > 2.0 * background)) {
        throw SolverError("background exceeds the fringe mean");
    }
    return {(mx - mn) / (mx + mn), (mx - mn) / (mx + mn - 2.0 * background)};
}

}  // namespace dfgqi
