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

#include "dfgqi/scenario.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include "dfgqi/errors.h"
#include "dfgqi/montecarlo.h"

namespace dfgqi {

std::vector<double> Grid::values() const {
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        v.push_back(n == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return v;
}

Grid Grid::parse(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
        throw DomainError(fmt::format("grid '{}' is not of the form start:stop:n", text));
    }
    auto number = [&](std::string_view part) {
        try {
            std::size_t used = 0;
            const std::string s(part);
            const double v = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument("trailing characters");
            }
            return v;
        } catch (const std::exception &) {
            throw DomainError(fmt::format("grid '{}': '{}' is not a number", text, part));
        }
    };
    Grid g;
    g.start = number(text.substr(0, c1));
    g.stop = number(text.substr(c1 + 1, c2 - c1 - 1));
    const double n = number(text.substr(c2 + 1));
    if (!(n >= 1) || n != std::floor(n)) {
        throw DomainError(fmt::format("grid '{}': point count must be a positive integer", text));
    }
    g.n = static_cast<std::size_t>(n);
    return g;
}

void PulseSource::validate() const {
    if (!(repetition_rate_mhz > 0)) {
        throw DomainError(fmt::format("repetition rate must be positive, got {} MHz", repetition_rate_mhz));
    }
    if (!(pulse_fwhm_ns >= 0) || !(mean_photon_number >= 0) || !(coherence_time_ns >= 0) ||
        !(cw_fraction >= 0)) {
        throw DomainError("source pulse width, mean photon number, coherence time and cw fraction must be >= 0");
    }
}

std::vector<std::string> PulseSource::warnings(double delta_tau_ns) const {
    std::vector<std::string> w;
    if (pulse_fwhm_ns >= delta_tau_ns) {
        w.push_back(fmt::format("pulse FWHM {} ns is not shorter than the bin separation {} ns; peaks overlap",
                                pulse_fwhm_ns, delta_tau_ns));
    }
    if (coherence_time_ns >= delta_tau_ns) {
        w.push_back(fmt::format(
            "source coherence time {} ns reaches the bin separation {} ns; single-photon interference in the "
            "side peaks is not modelled",
            coherence_time_ns, delta_tau_ns));
    }
    return w;
}

void Scenario::validate() const {
    source.validate();
    preparation.validate();
    analysis.validate();
    const double mismatch = std::abs(analysis.delta_tau_ns - preparation.delta_tau_ns) / preparation.delta_tau_ns;
    if (mismatch > kDelayMatchTolerance) {
        throw DomainError(fmt::format("interferometer delays {} ns and {} ns differ by more than 1 %",
                                      preparation.delta_tau_ns, analysis.delta_tau_ns));
    }
    qpm.validate();
    pump.validate();
    if (!(signal_wavelength_um > 0) || !(signal_power_w >= 0)) {
        throw DomainError("signal wavelength must be positive and signal power >= 0");
    }
    dfg_output_wavelength(signal_wavelength_um, pump.wavelength_um);
    if (!(eta_norm_per_w_cm2 >= 0)) {
        throw DomainError(fmt::format("eta_norm must be >= 0, got {}", eta_norm_per_w_cm2));
    }
    if (waveguide_post_stages > chain_post.stages().size()) {
        throw DomainError("waveguide_post_stages exceeds the number of post-conversion stages");
    }
    noise.validate();
    detector.validate();
    sca.validate();
    if (!(bin_width_ps > 0)) {
        throw DomainError(fmt::format("bin width must be positive, got {} ps", bin_width_ps));
    }
    if (!(tac_offset_ns >= 0) || !(tac_offset_ns + 2 * analysis.delta_tau_ns < source.period_ns())) {
        throw DomainError("the three TAC peaks must fit inside one sync period after tac offset");
    }
    if (phase_walk_steps < 1) {
        throw DomainError("phase_walk_steps must be >= 1");
    }
    if (!(sweep_duration_s > 0) || !(sweep_target_rate_hz > 0)) {
        throw DomainError("efficiency sweep duration and target rate must be positive");
    }
    link.validate();
}

double Scenario::output_wavelength_um() const {
    return dfg_output_wavelength(signal_wavelength_um, pump.wavelength_um);
}

double Scenario::eta_qi() const {
    return end_to_end_efficiency(pump.power_w, eta_norm_per_w_cm2, qpm.length_cm, chain_pre, chain_post);
}

PeakShape Scenario::peak_shape() const {
    return {source.pulse_fwhm_ns, source.shape == PulseShape::square,
            detector.jitter_fwhm_ps * 1e-3 / kFwhmPerSigma};
}

namespace {

// Map reader that remembers which keys were consumed, so typos surface as errors.
class Section {
   public:
    Section(YAML::Node node, std::string path, const std::string &file)
        : node_(std::move(node)), path_(std::move(path)), file_(file) {
        if (node_.IsDefined() && node_.IsNull()) {
            node_ = YAML::Node(YAML::NodeType::Map);
        }
        if (node_ && !node_.IsMap()) {
            throw ConfigError(file_, path_, "expected a mapping");
        }
    }

    bool has(const std::string &key) const {
        const YAML::Node &n = node_;
        return n && n[key] && !n[key].IsNull();
    }

    template <typename T>
    T get(const std::string &key) {
        if (!has(key)) {
            throw ConfigError(file_, full(key), "required key is missing");
        }
        return convert<T>(key);
    }

    template <typename T>
    T get_or(const std::string &key, T fallback) {
        return has(key) ? convert<T>(key) : fallback;
    }

    std::uint64_t count(const std::string &key, std::uint64_t fallback) {
        if (!has(key)) {
            return fallback;
        }
        const double v = convert<double>(key);
        if (!(v >= 0) || v != std::floor(v) || v > 1.8e19) {
            throw ConfigError(file_, full(key), "must be a non-negative integer");
        }
        return static_cast<std::uint64_t>(v);
    }

    Section child(const std::string &key) {
        seen_.insert(key);
        return Section(has(key) ? node_[key] : YAML::Node(YAML::NodeType::Map), full(key), file_);
    }

    YAML::Node raw(const std::string &key) {
        seen_.insert(key);
        return has(key) ? node_[key] : YAML::Node(YAML::NodeType::Undefined);
    }

    std::string full(const std::string &key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    void finish() const {
        if (!node_) {
            return;
        }
        for (const auto &kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) {
                throw ConfigError(file_, full(key), "unknown key");
            }
        }
    }

    const std::string &file() const {
        return file_;
    }

   private:
    template <typename T>
    T convert(const std::string &key) {
        seen_.insert(key);
        try {
            return node_[key].template as<T>();
        } catch (const YAML::Exception &) {
            throw ConfigError(file_, full(key), "has the wrong type");
        }
    }

    YAML::Node node_;
    std::string path_;
    const std::string &file_;
    std::set<std::string> seen_;
};

Grid read_grid(Section &parent, const std::string &key, Grid fallback) {
    if (!parent.has(key)) {
        parent.child(key);
        return fallback;
    }
    Section g = parent.child(key);
    Grid grid;
    grid.start = g.get<double>("start");
    grid.stop = g.get<double>("stop");
    grid.n = g.count("n", 0);
    if (grid.n == 0) {
        throw ConfigError(parent.file(), parent.full(key) + ".n", "grid needs at least one point");
    }
    g.finish();
    return grid;
}

Interferometer read_interferometer(Section sec) {
    Interferometer ifo;
    ifo.delta_tau_ns = sec.get<double>("delta_tau_ns");
    ifo.phase_rad = sec.get_or<double>("phase_rad", 0.0);
    ifo.transmission = sec.get_or<double>("transmission", 1.0);
    ifo.splitting_ratio = sec.get_or<double>("splitting_ratio", 0.5);
    sec.finish();
    return ifo;
}

LossChain read_chain(Section &parent, const std::string &key) {
    const YAML::Node list = parent.raw(key);
    LossChain chain;
    if (!list) {
        return chain;
    }
    const std::string path = parent.full(key);
    if (!list.IsSequence()) {
        throw ConfigError(parent.file(), path, "expected a list of {name, value, unit} records");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        Section rec(list[i], fmt::format("{}[{}]", path, i), parent.file());
        LossStage stage;
        stage.name = rec.get<std::string>("name");
        stage.value = rec.get<double>("value");
        const auto unit = rec.get_or<std::string>("unit", "fraction");
        if (unit == "fraction") {
            stage.unit = StageUnit::fraction;
        } else if (unit == "dB") {
            stage.unit = StageUnit::db;
        } else {
            throw ConfigError(parent.file(), rec.full("unit"), "must be 'fraction' or 'dB'");
        }
        rec.finish();
        try {
            chain.add(stage);
        } catch (const DomainError &e) {
            throw ConfigError(parent.file(), fmt::format("{}[{}]", path, i), e.what());
        }
    }
    return chain;
}

template <typename F>
void check(const std::string &file, const std::string &key, F &&f) {
    try {
        f();
    } catch (const DomainError &e) {
        throw ConfigError(file, key, e.what());
    } catch (const SolverError &e) {
        throw ConfigError(file, key, e.what());
    }
}

}  // namespace

Scenario parse_scenario(const std::string &text, const std::filesystem::path &base_dir,
                        const std::string &source_name) {
    const std::string &file = source_name;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception &e) {
        throw ConfigError(file, "", fmt::format("YAML parse error at line {}: {}", e.mark.line + 1, e.msg));
    }
    if (!root.IsMap()) {
        throw ConfigError(file, "", "a scenario must be a YAML mapping");
    }
    Section top(root, "", file);
    Scenario s;
    s.name = top.get_or<std::string>("name", "unnamed");
    s.seed = top.count("seed", 1);

    {
        Section src = top.child("source");
        s.source.repetition_rate_mhz = src.get<double>("repetition_rate_mhz");
        s.source.pulse_fwhm_ns = src.get<double>("pulse_fwhm_ns");
        const auto shape = src.get_or<std::string>("pulse_shape", "gaussian");
        if (shape == "gaussian") {
            s.source.shape = PulseShape::gaussian;
        } else if (shape == "square") {
            s.source.shape = PulseShape::square;
        } else {
            throw ConfigError(file, "source.pulse_shape", "must be 'gaussian' or 'square'");
        }
        s.source.mean_photon_number = src.get<double>("mean_photon_number");
        s.source.coherence_time_ns = src.get_or<double>("coherence_time_ns", 0.01);
        s.source.cw_fraction = src.get_or<double>("cw_fraction", 0.0);
        s.signal_wavelength_um = src.get<double>("signal_wavelength_um");
        s.signal_power_w = src.get_or<double>("signal_power_w", 250e-6);
        src.finish();
    }
    s.preparation = read_interferometer(top.child("preparation"));
    s.analysis = read_interferometer(top.child("analysis"));

    {
        Section q = top.child("qpm");
        s.sellmeier_file = q.get<std::string>("sellmeier_file");
        s.qpm.period_um = q.get<double>("period_um");
        s.qpm.length_cm = q.get<double>("length_cm");
        s.qpm.temperature_k = q.get<double>("temperature_k");
        s.qpm.order = q.get_or<int>("order", 1);
        q.finish();
        std::filesystem::path sp(s.sellmeier_file);
        if (sp.is_relative()) {
            sp = base_dir / sp;
        }
        s.sellmeier = SellmeierModel::load(sp);
    }
    {
        Section p = top.child("pump");
        s.pump.power_w = p.get<double>("power_w");
        s.pump.wavelength_um = p.get<double>("wavelength_um");
        s.pump.coherence_time_ns = p.get_or<double>("coherence_time_ns", kInfinity);
        p.finish();
    }
    {
        Section c = top.child("conversion");
        s.eta_norm_per_w_cm2 = c.get<double>("eta_norm_per_W_cm2");
        s.chain_pre = read_chain(c, "chain_pre");
        s.chain_post = read_chain(c, "chain_post");
        s.waveguide_post_stages = c.count("waveguide_post_stages", 0);
        c.finish();
    }
    {
        Section n = top.child("noise");
        s.noise.spdc_hz_per_w = n.get_or<double>("spdc_hz_per_w", 0.0);
        s.noise.raman_hz_per_w = n.get_or<double>("raman_hz_per_w", 0.0);
        s.noise.pump_extinction_db = n.get_or<double>("pump_extinction_db", kInfinity);
        s.noise.unfiltered_pump_hz_per_w = n.get_or<double>("unfiltered_pump_hz_per_w", 0.0);
        s.noise.pump_prefilter = n.get_or<bool>("pump_prefilter", true);
        n.finish();
    }
    {
        Section d = top.child("detector");
        s.detector.efficiency = d.get<double>("efficiency");
        s.detector.dark_count_rate_hz = d.get<double>("dark_count_rate_hz");
        s.detector.dead_time_us = d.get<double>("dead_time_us");
        s.detector.jitter_fwhm_ps = d.get<double>("jitter_fwhm_ps");
        s.detector.afterpulse_probability = d.get_or<double>("afterpulse_probability", 0.0);
        s.detector.afterpulse_decay_us = d.get_or<double>("afterpulse_decay_us", 10.0);
        d.finish();
    }
    {
        Section t = top.child("tac");
        s.tac_offset_ns = t.get_or<double>("offset_ns", 3.0);
        s.bin_width_ps = t.get_or<double>("bin_width_ps", 20.0);
        s.sca.width_ns = t.get_or<double>("sca_width_ns", 0.5);
        s.sca.center_ns = t.get_or<double>("sca_center_ns", s.tac_offset_ns + s.analysis.delta_tau_ns);
        t.finish();
    }
    {
        Section m = top.child("montecarlo");
        s.pulses_per_point = m.count("pulses_per_point", 1'000'000);
        s.phase_walk_steps = m.get_or<int>("phase_walk_steps", 16);
        s.phases = read_grid(m, "phases", Grid{0.0, 2.0 * 3.141592653589793 * 11.0 / 12.0, 12});
        m.finish();
    }
    {
        Section e = top.child("efficiency_sweep");
        s.sweep_duration_s = e.get_or<double>("duration_s", 10.0);
        s.sweep_target_rate_hz = e.get_or<double>("target_count_rate_hz", 4400.0);
        s.powers = read_grid(e, "powers", Grid{0.0, 0.65, 14});
        e.finish();
    }
    {
        Section cal = top.child("calibration");
        if (cal.has("net_visibility")) {
            s.calibration.net_visibility = cal.get<double>("net_visibility");
        }
        if (cal.has("cw_share_of_peak")) {
            s.calibration.cw_share_of_peak = cal.get<double>("cw_share_of_peak");
        }
        if (cal.has("background_to_signal")) {
            s.calibration.background_to_signal = cal.get<double>("background_to_signal");
        }
        cal.finish();
    }
    {
        Section r = top.child("repeater");
        s.link.native_attenuation_db_per_km = r.get_or<double>("native_attenuation_db_per_km", 4.0);
        s.link.telecom_attenuation_db_per_km = r.get_or<double>("telecom_attenuation_db_per_km", 0.2);
        s.link.interface_efficiency = r.get_or<double>("interface_efficiency", 0.5);
        s.link.system_efficiency = r.get_or<double>("system_efficiency", 1.0);
        s.link.attempt_rate_hz = r.get_or<double>("attempt_rate_hz", 1e4);
        s.link.length_km = r.get_or<double>("length_km", 50.0);
        const auto proto = r.get_or<std::string>("protocol", "single-photon");
        check(file, "repeater.protocol", [&] { s.link.protocol = parse_protocol(proto); });
        s.lengths_km = read_grid(r, "lengths_km", Grid{0.0, 100.0, 21});
        r.finish();
    }
    top.finish();

    check(file, "", [&] { s.validate(); });
    check(file, "calibration", [&] { apply_calibration(s); });
    return s;
}

Scenario load_scenario(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "", "cannot open scenario file");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.parent_path(), path.string());
}

namespace {

void emit_interferometer(YAML::Emitter &out, const char *key, const Interferometer &ifo) {
    out << YAML::Key << key << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "delta_tau_ns" << YAML::Value << ifo.delta_tau_ns;
    out << YAML::Key << "phase_rad" << YAML::Value << ifo.phase_rad;
    out << YAML::Key << "transmission" << YAML::Value << ifo.transmission;
    out << YAML::Key << "splitting_ratio" << YAML::Value << ifo.splitting_ratio;
    out << YAML::EndMap;
}

void emit_chain(YAML::Emitter &out, const char *key, const LossChain &chain) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto &st : chain.stages()) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << st.name;
        out << YAML::Key << "value" << YAML::Value << st.value;
        out << YAML::Key << "unit" << YAML::Value << (st.unit == StageUnit::db ? "dB" : "fraction");
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
}

void emit_grid(YAML::Emitter &out, const char *key, const Grid &g) {
    out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "start" << YAML::Value << g.start;
    out << YAML::Key << "stop" << YAML::Value << g.stop;
    out << YAML::Key << "n" << YAML::Value << g.n;
    out << YAML::EndMap;
}

}  // namespace

std::string serialize_scenario(const Scenario &s) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "seed" << YAML::Value << s.seed;

    out << YAML::Key << "source" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "repetition_rate_mhz" << YAML::Value << s.source.repetition_rate_mhz;
    out << YAML::Key << "pulse_fwhm_ns" << YAML::Value << s.source.pulse_fwhm_ns;
    out << YAML::Key << "pulse_shape" << YAML::Value
        << (s.source.shape == PulseShape::square ? "square" : "gaussian");
    out << YAML::Key << "mean_photon_number" << YAML::Value << s.source.mean_photon_number;
    out << YAML::Key << "coherence_time_ns" << YAML::Value << s.source.coherence_time_ns;
    out << YAML::Key << "cw_fraction" << YAML::Value << s.source.cw_fraction;
    out << YAML::Key << "signal_wavelength_um" << YAML::Value << s.signal_wavelength_um;
    out << YAML::Key << "signal_power_w" << YAML::Value << s.signal_power_w;
    out << YAML::EndMap;

    emit_interferometer(out, "preparation", s.preparation);
    emit_interferometer(out, "analysis", s.analysis);

    out << YAML::Key << "qpm" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sellmeier_file" << YAML::Value << s.sellmeier_file;
    out << YAML::Key << "period_um" << YAML::Value << s.qpm.period_um;
    out << YAML::Key << "length_cm" << YAML::Value << s.qpm.length_cm;
    out << YAML::Key << "temperature_k" << YAML::Value << s.qpm.temperature_k;
    out << YAML::Key << "order" << YAML::Value << s.qpm.order;
    out << YAML::EndMap;

    out << YAML::Key << "pump" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "power_w" << YAML::Value << s.pump.power_w;
    out << YAML::Key << "wavelength_um" << YAML::Value << s.pump.wavelength_um;
    out << YAML::Key << "coherence_time_ns" << YAML::Value << s.pump.coherence_time_ns;
    out << YAML::EndMap;

    out << YAML::Key << "conversion" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "eta_norm_per_W_cm2" << YAML::Value << s.eta_norm_per_w_cm2;
    out << YAML::Key << "waveguide_post_stages" << YAML::Value << s.waveguide_post_stages;
    emit_chain(out, "chain_pre", s.chain_pre);
    emit_chain(out, "chain_post", s.chain_post);
    out << YAML::EndMap;

    out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "spdc_hz_per_w" << YAML::Value << s.noise.spdc_hz_per_w;
    out << YAML::Key << "raman_hz_per_w" << YAML::Value << s.noise.raman_hz_per_w;
    out << YAML::Key << "pump_extinction_db" << YAML::Value << s.noise.pump_extinction_db;
    out << YAML::Key << "unfiltered_pump_hz_per_w" << YAML::Value << s.noise.unfiltered_pump_hz_per_w;
    out << YAML::Key << "pump_prefilter" << YAML::Value << s.noise.pump_prefilter;
    out << YAML::EndMap;

    out << YAML::Key << "detector" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "efficiency" << YAML::Value << s.detector.efficiency;
    out << YAML::Key << "dark_count_rate_hz" << YAML::Value << s.detector.dark_count_rate_hz;
    out << YAML::Key << "dead_time_us" << YAML::Value << s.detector.dead_time_us;
    out << YAML::Key << "jitter_fwhm_ps" << YAML::Value << s.detector.jitter_fwhm_ps;
    out << YAML::Key << "afterpulse_probability" << YAML::Value << s.detector.afterpulse_probability;
    out << YAML::Key << "afterpulse_decay_us" << YAML::Value << s.detector.afterpulse_decay_us;
    out << YAML::EndMap;

    out << YAML::Key << "tac" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "offset_ns" << YAML::Value << s.tac_offset_ns;
    out << YAML::Key << "bin_width_ps" << YAML::Value << s.bin_width_ps;
    out << YAML::Key << "sca_center_ns" << YAML::Value << s.sca.center_ns;
    out << YAML::Key << "sca_width_ns" << YAML::Value << s.sca.width_ns;
    out << YAML::EndMap;

    out << YAML::Key << "montecarlo" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "pulses_per_point" << YAML::Value << s.pulses_per_point;
    out << YAML::Key << "phase_walk_steps" << YAML::Value << s.phase_walk_steps;
    emit_grid(out, "phases", s.phases);
    out << YAML::EndMap;

    out << YAML::Key << "efficiency_sweep" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "duration_s" << YAML::Value << s.sweep_duration_s;
    out << YAML::Key << "target_count_rate_hz" << YAML::Value << s.sweep_target_rate_hz;
    emit_grid(out, "powers", s.powers);
    out << YAML::EndMap;

    out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
    if (s.calibration.net_visibility) {
        out << YAML::Key << "net_visibility" << YAML::Value << *s.calibration.net_visibility;
    }
    if (s.calibration.cw_share_of_peak) {
        out << YAML::Key << "cw_share_of_peak" << YAML::Value << *s.calibration.cw_share_of_peak;
    }
    if (s.calibration.background_to_signal) {
        out << YAML::Key << "background_to_signal" << YAML::Value << *s.calibration.background_to_signal;
    }
    out << YAML::EndMap;

    out << YAML::Key << "repeater" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "length_km" << YAML::Value << s.link.length_km;
    out << YAML::Key << "native_attenuation_db_per_km" << YAML::Value << s.link.native_attenuation_db_per_km;
    out << YAML::Key << "telecom_attenuation_db_per_km" << YAML::Value << s.link.telecom_attenuation_db_per_km;
    out << YAML::Key << "interface_efficiency" << YAML::Value << s.link.interface_efficiency;
    out << YAML::Key << "system_efficiency" << YAML::Value << s.link.system_efficiency;
    out << YAML::Key << "protocol" << YAML::Value << std::string(to_string(s.link.protocol));
    out << YAML::Key << "attempt_rate_hz" << YAML::Value << s.link.attempt_rate_hz;
    emit_grid(out, "lengths_km", s.lengths_km);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string scenario_digest(const Scenario &s) {
    const std::string text = serialize_scenario(s);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::string hex;
    for (unsigned int i = 0; i < 6 && i < len; ++i) {
        hex += fmt::format("{:02x}", md[i]);
    }
    return hex;
}

}  // namespace dfgqi
