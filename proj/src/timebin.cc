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

#include "dfgqi/timebin.h"

#include <cmath>

#include <fmt/format.h>

#include "dfgqi/errors.h"

namespace dfgqi {

void Interferometer::validate() const {
    if (!(delta_tau_ns > 0)) {
        throw DomainError(fmt::format("interferometer delay must be positive, got {} ns", delta_tau_ns));
    }
    if (!(transmission >= 0 && transmission <= 1)) {
        throw DomainError(fmt::format("interferometer transmission must lie in [0, 1], got {}", transmission));
    }
    if (!(splitting_ratio > 0 && splitting_ratio < 1)) {
        throw DomainError(fmt::format("splitting ratio must lie in (0, 1), got {}", splitting_ratio));
    }
    if (!std::isfinite(phase_rad)) {
        throw DomainError("interferometer phase must be finite");
    }
}

TimeBinQubit prepare_qubit(const Interferometer &ifo) {
    ifo.validate();
    const double s = ifo.splitting_ratio;
    const double amp = std::sqrt(s * (1.0 - s) * ifo.transmission);
    TimeBinQubit q;
    q.early = amp;
    q.late = std::polar(amp, ifo.phase_rad);
    q.delta_tau_ns = ifo.delta_tau_ns;
    q.coherence = 1.0;
    return q;
}

TimeBinQubit apply_conversion_phase(TimeBinQubit q, double factor) {
    if (!(factor >= 0 && factor <= 1)) {
        throw DomainError(fmt::format("coherence factor must lie in [0, 1], got {}", factor));
    }
    q.coherence *= factor;
    return q;
}

TimeBinQubit shift_late_phase(TimeBinQubit q, double phase_rad) {
    q.late *= std::polar(1.0, phase_rad);
    return q;
}

SlotProbabilities analyze(const TimeBinQubit &q, const Interferometer &ifo, double t0_ns) {
    ifo.validate();
    const double mismatch = std::abs(ifo.delta_tau_ns - q.delta_tau_ns) / q.delta_tau_ns;
    if (mismatch > kDelayMatchTolerance) {
        throw DomainError(fmt::format(
            "analysis delay {} ns differs from the qubit bin separation {} ns by {:.2f} % (> 1 %)",
            ifo.delta_tau_ns, q.delta_tau_ns, 100.0 * mismatch));
    }
    const double s = ifo.splitting_ratio;
    const double t = ifo.transmission;
    const std::complex<double> arm = std::polar(1.0, ifo.phase_rad);

    // Forward port: short arm and long arm both carry sqrt(s(1-s)).
    // Back port: short arm carries (1-s), long arm carries -s.
    const double fwd = s * (1.0 - s) * t;
    const std::complex<double> early_long = q.early * arm;
    const double cross = 2.0 * q.coherence * std::real(early_long * std::conj(q.late));
    const double diag = std::norm(q.early) + std::norm(q.late);

    SlotProbabilities r;
    const double dt = 0.5 * (ifo.delta_tau_ns + q.delta_tau_ns);
    r.slots[0] = {t0_ns, fwd * std::norm(q.early)};
    r.slots[1] = {t0_ns + dt, fwd * (diag + cross)};
    r.slots[2] = {t0_ns + 2.0 * dt, fwd * std::norm(q.late)};

    const double a = (1.0 - s);
    const double b = s;
    r.back_port = t * ((a * a + b * b) * diag - a * b * cross);
    r.transmission_loss = (1.0 - t) * diag;
    return r;
}

double FringeOracle::counts(double beta_rad) const {
    return signal_scale * (1.0 + v_net * std::cos(alpha_rad - beta_rad)) / 2.0 + background;
}

std::vector<double> FringeOracle::curve(std::span<const double> phases) const {
    std::vector<double> out;
    out.reserve(phases.size());
    for (double beta : phases) {
        out.push_back(counts(beta));
    }
    return out;
}

double FringeOracle::v_raw() const {
    return signal_scale * v_net / (signal_scale + 2.0 * background);
}

FringeOracle fringe_oracle(const FringeParams &p) {
    if (!(p.signal_scale > 0)) {
        throw DomainError(fmt::format("signal scale must be positive, got {}", p.signal_scale));
    }
    if (!(p.background_dark >= 0) || !(p.background_cw >= 0)) {
        throw DomainError("fringe backgrounds must be >= 0");
    }
    if (!(p.coherence >= 0 && p.coherence <= 1) || !(p.penalty >= 0 && p.penalty <= 1)) {
        throw DomainError("coherence and penalty factors must lie in [0, 1]");
    }
    FringeOracle o;
    o.signal_scale = p.signal_scale;
    o.v_net = p.coherence * p.penalty;
    o.background = p.background_dark + p.background_cw;
    o.alpha_rad = p.alpha_rad;
    return o;
}

}  // namespace dfgqi
