#pragma once

// Declarative parameter sweeps.  A sweep is described by a flat key-value
// config (dotted keys, `#` comments), validated strictly, evaluated over
// up to two numeric axes plus one choice axis (click patterns or detector
// strategies), and written as CSV with a metadata sidecar that is itself
// a valid sweep config.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsd/analysis.hpp"
#include "qsd/pipeline.hpp"
#include "qsd/version.hpp"

namespace qsd {

// What produces the evaluated state: the full detector-level pipeline,
// the ideal analytic scheme, or the bare (optionally attenuated) input.
enum class RunModel { Realistic, Ideal, Coherent };

inline const char* to_string(RunModel model) {
    switch (model) {
        case RunModel::Realistic: return "realistic";
        case RunModel::Ideal: return "ideal";
        case RunModel::Coherent: return "coherent";
    }
    return "?";
}

enum class ObservableKind {
    Fidelity,
    Probability,
    Rate,
    FidelityDephased,
    FidelityAttenuated,
    FidelityAttenuatedOptimal,
    Wigner,
    PhaseDist,
    Marginals,
};

struct Observable {
    ObservableKind kind = ObservableKind::Fidelity;
    double xi = 1.0;   // attenuation for FidelityAttenuated
    std::string label; // CSV column name / output file suffix

    bool is_field() const {
        return kind == ObservableKind::Wigner || kind == ObservableKind::PhaseDist ||
               kind == ObservableKind::Marginals;
    }
};

struct SweepAxis {
    std::string parameter;
    std::vector<double> values;
};

struct SweepConfig {
    RunModel model = RunModel::Realistic;
    QsdConfig base = QsdConfig::standard();
    std::optional<SweepAxis> axis1;
    std::optional<SweepAxis> axis2;
    std::vector<ClickPattern> patterns;   // realistic only; filled during validation
    std::vector<Strategy> strategies;     // realistic alternative to patterns
    IdealOutcome outcome = IdealOutcome::SingleAtD2;
    CorrectionMode correction = CorrectionMode::Auto;
    double baseline_xi = 1.0; // attenuation of the coherent reference state
    std::vector<Observable> observables;
    PhaseSpaceGrid grid;
    int phase_n_radial = 200;
    int phase_n_theta = 360;

    bool uses_strategies() const { return !strategies.empty(); }
    bool has_scalar_observables() const {
        for (const auto& obs : observables)
            if (!obs.is_field()) return true;
        return false;
    }
    bool has_field_observables() const {
        for (const auto& obs : observables)
            if (obs.is_field()) return true;
        return false;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(trim(s.substr(start)));
            break;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return parts;
}

inline double parse_double(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size())
        throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
    return parsed;
}

inline int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = int(v);
    if (double(i) != v)
        throw ConfigError("config key '" + key + "': '" + value + "' is not an integer");
    return i;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> values;
    for (const auto& part : split(value, ',')) values.push_back(parse_double(key, part));
    return values;
}

inline ClickPattern parse_pattern(const std::string& key, const std::string& value) {
    // accept both "1,1,0" and "1:1:0"
    const auto parts = split(value, value.find(':') != std::string::npos ? ':' : ',');
    if (parts.size() != 3)
        throw ConfigError("config key '" + key + "': pattern needs three labels (n1,n2,n3)");
    return ClickPattern{parse_int(key, parts[0]), parse_int(key, parts[1]),
                        parse_int(key, parts[2])};
}

inline Strategy parse_strategy(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "a") return Strategy::A;
    if (v == "b") return Strategy::B;
    if (v == "c") return Strategy::C;
    if (v == "d") return Strategy::D;
    throw ConfigError("config key '" + key + "': unknown strategy '" + value +
                      "' (expected a, b, c, or d)");
}

inline DetectorKind parse_kind(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (v == "cpc") return DetectorKind::Cpc;
    if (v == "spc") return DetectorKind::Spc;
    if (v == "pndc") return DetectorKind::Pndc;
    throw ConfigError("config key '" + key + "': unknown detector kind '" + value +
                      "' (expected cpc, spc, or pndc)");
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

inline std::string pattern_label(const ClickPattern& p) {
    return std::to_string(p.n1) + ":" + std::to_string(p.n2) + ":" + std::to_string(p.n3);
}

} // namespace detail

inline Observable parse_observable(const std::string& spec) {
    const std::string v = detail::trim(spec);
    if (v == "fidelity") return {ObservableKind::Fidelity, 1.0, "fidelity"};
    if (v == "probability") return {ObservableKind::Probability, 1.0, "probability"};
    if (v == "rate") return {ObservableKind::Rate, 1.0, "rate"};
    if (v == "fidelity_dephased")
        return {ObservableKind::FidelityDephased, 1.0, "fidelity_dephased"};
    if (v == "fidelity_attenuated_optimal")
        return {ObservableKind::FidelityAttenuatedOptimal, 1.0, "fidelity_attenuated_optimal"};
    if (v.rfind("fidelity_attenuated:", 0) == 0) {
        const std::string arg = detail::trim(v.substr(v.find(':') + 1));
        const double xi = detail::parse_double("observables", arg);
        if (xi < 0.0 || xi > 1.0)
            throw ConfigError("observable '" + v + "': attenuation must lie in [0, 1]");
        return {ObservableKind::FidelityAttenuated, xi, "fidelity_attenuated_" + arg};
    }
    if (v == "wigner") return {ObservableKind::Wigner, 1.0, "wigner"};
    if (v == "phase_dist") return {ObservableKind::PhaseDist, 1.0, "phase_dist"};
    if (v == "marginals") return {ObservableKind::Marginals, 1.0, "marginals"};
    throw ConfigError("unknown observable '" + v + "'");
}

namespace detail {

// Numeric parameters a sweep axis may vary, per model.
inline bool axis_allowed(RunModel model, const std::string& name) {
    static const char* alpha_axes[] = {"alpha.magnitude_sq", "alpha.phase"};
    static const char* splitter_axes[] = {"bs.t_sq", "bs1.t_sq", "bs2.t_sq"};
    static const char* device_axes[] = {
        "source.gamma_sq",     "source.pump_phase",   "rep_rate",
        "detectors.eta",       "detectors.r_dark",    "detectors.tau_res",
        "detectors.d1.eta",    "detectors.d1.r_dark", "detectors.d1.tau_res",
        "detectors.d2.eta",    "detectors.d2.r_dark", "detectors.d2.tau_res",
        "detectors.d3.eta",    "detectors.d3.r_dark", "detectors.d3.tau_res"};
    for (const char* a : alpha_axes)
        if (name == a) return true;
    if (model == RunModel::Ideal || model == RunModel::Realistic)
        for (const char* a : splitter_axes)
            if (name == a) return true;
    if (model == RunModel::Realistic)
        for (const char* a : device_axes)
            if (name == a) return true;
    return false;
}

inline void apply_parameter(QsdConfig& config, const std::string& name, double value) {
    const auto set_eta = [&](DetectorModel& d) {
        d = DetectorModel::make(d.kind, value, d.r_dark, d.tau_res);
    };
    const auto set_r_dark = [&](DetectorModel& d) {
        d = DetectorModel::make(d.kind, d.eta, value, d.tau_res);
    };
    const auto set_tau = [&](DetectorModel& d) {
        d = DetectorModel::make(d.kind, d.eta, d.r_dark, value);
    };
    if (name == "alpha.magnitude_sq") {
        if (value < 0.0) throw ConfigError("alpha.magnitude_sq must be >= 0");
        config.alpha = std::polar(std::sqrt(value), std::arg(config.alpha));
    } else if (name == "alpha.phase") {
        config.alpha = std::polar(std::abs(config.alpha), value);
    } else if (name == "bs.t_sq") {
        config.bs1 = BeamSplitterParams::from_transmittance(value);
        config.bs2 = BeamSplitterParams::from_transmittance(value);
    } else if (name == "bs1.t_sq") {
        config.bs1 = BeamSplitterParams::from_transmittance(value);
    } else if (name == "bs2.t_sq") {
        config.bs2 = BeamSplitterParams::from_transmittance(value);
    } else if (name == "source.gamma_sq") {
        config.source = SpdcParams::from_pair_probability(value, config.source.pump_phase,
                                                          config.source.pair_cutoff);
    } else if (name == "source.pump_phase") {
        config.source = SpdcParams(config.source.gamma, value, config.source.pair_cutoff);
    } else if (name == "rep_rate") {
        if (value <= 0.0) throw ConfigError("rep_rate must be > 0");
        config.rep_rate = value;
    } else if (name == "detectors.eta") {
        set_eta(config.d1), set_eta(config.d2), set_eta(config.d3);
    } else if (name == "detectors.r_dark") {
        set_r_dark(config.d1), set_r_dark(config.d2), set_r_dark(config.d3);
    } else if (name == "detectors.tau_res") {
        set_tau(config.d1), set_tau(config.d2), set_tau(config.d3);
    } else if (name == "detectors.d1.eta") {
        set_eta(config.d1);
    } else if (name == "detectors.d1.r_dark") {
        set_r_dark(config.d1);
    } else if (name == "detectors.d1.tau_res") {
        set_tau(config.d1);
    } else if (name == "detectors.d2.eta") {
        set_eta(config.d2);
    } else if (name == "detectors.d2.r_dark") {
        set_r_dark(config.d2);
    } else if (name == "detectors.d2.tau_res") {
        set_tau(config.d2);
    } else if (name == "detectors.d3.eta") {
        set_eta(config.d3);
    } else if (name == "detectors.d3.r_dark") {
        set_r_dark(config.d3);
    } else if (name == "detectors.d3.tau_res") {
        set_tau(config.d3);
    } else {
        throw ConfigError("unknown sweep parameter '" + name + "'");
    }
}

// Raw key-value view of a config file: strict, duplicate-free.
class KeyValueFile {
  public:
    explicit KeyValueFile(const std::string& text) {
        std::string line;
        std::istringstream stream(text);
        int line_no = 0;
        while (std::getline(stream, line)) {
            ++line_no;
            const std::string stripped = trim(line);
            if (stripped.empty() || stripped[0] == '#') continue;
            const auto eq = stripped.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
            const std::string key = trim(stripped.substr(0, eq));
            const std::string value = trim(stripped.substr(eq + 1));
            if (key.empty())
                throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
            if (!entries_.emplace(key, value).second)
                throw ConfigError("config: duplicate key '" + key + "'");
        }
    }

    std::optional<std::string> take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        std::string value = it->second;
        entries_.erase(it);
        return value;
    }

    void expect_exhausted() const {
        if (!entries_.empty())
            throw ConfigError("config: unknown key '" + entries_.begin()->first + "'");
    }

  private:
    std::map<std::string, std::string> entries_;
};

inline std::optional<SweepAxis> parse_axis(KeyValueFile& file, const std::string& prefix,
                                           RunModel model) {
    const auto parameter = file.take(prefix + ".parameter");
    const auto values = file.take(prefix + ".values");
    const auto from = file.take(prefix + ".from");
    const auto to = file.take(prefix + ".to");
    const auto step = file.take(prefix + ".step");
    if (!parameter) {
        if (values || from || to || step)
            throw ConfigError("config: '" + prefix + ".*' given without '" + prefix +
                              ".parameter'");
        return std::nullopt;
    }
    SweepAxis axis;
    axis.parameter = trim(*parameter);
    if (!axis_allowed(model, axis.parameter))
        throw ConfigError("config: parameter '" + axis.parameter +
                          "' cannot be swept with model=" + to_string(model));
    if (values) {
        if (from || to || step)
            throw ConfigError("config: '" + prefix + ".values' excludes '" + prefix +
                              ".from/to/step'");
        axis.values = parse_double_list(prefix + ".values", *values);
    } else {
        if (!from || !to || !step)
            throw ConfigError("config: '" + prefix + "' needs either .values or .from/.to/.step");
        const double a = parse_double(prefix + ".from", *from);
        const double b = parse_double(prefix + ".to", *to);
        const double h = parse_double(prefix + ".step", *step);
        if (h <= 0.0) throw ConfigError("config: '" + prefix + ".step' must be > 0");
        if (b < a) throw ConfigError("config: '" + prefix + ".to' must be >= '.from'");
        for (int k = 0;; ++k) {
            const double v = a + h * double(k);
            if (v > b + h * 1e-9) break;
            axis.values.push_back(v);
        }
    }
    if (axis.values.empty())
        throw ConfigError("config: sweep axis '" + axis.parameter + "' has no values");
    return axis;
}

} // namespace detail

// Parse and validate a sweep config from flat key-value text.
inline SweepConfig parse_sweep_config(const std::string& text) {
    detail::KeyValueFile file(text);
    SweepConfig config;

    if (const auto v = file.take("model")) {
        const std::string m = detail::trim(*v);
        if (m == "realistic")
            config.model = RunModel::Realistic;
        else if (m == "ideal")
            config.model = RunModel::Ideal;
        else if (m == "coherent")
            config.model = RunModel::Coherent;
        else
            throw ConfigError("config key 'model': expected realistic, ideal, or coherent");
    }
    const RunModel model = config.model;
    const bool realistic = model == RunModel::Realistic;
    const bool ideal = model == RunModel::Ideal;

    // --- input state ---
    double magnitude_sq = 1.0, phase = 0.0;
    if (const auto v = file.take("alpha.magnitude_sq")) {
        magnitude_sq = detail::parse_double("alpha.magnitude_sq", *v);
        if (magnitude_sq < 0.0) throw ConfigError("alpha.magnitude_sq must be >= 0");
    }
    if (const auto v = file.take("alpha.phase")) phase = detail::parse_double("alpha.phase", *v);
    config.base.alpha = std::polar(std::sqrt(magnitude_sq), phase);

    // --- cutoff ---
    if (const auto v = file.take("cutoff.n_max"))
        config.base.cutoff = CutoffDim(detail::parse_int("cutoff.n_max", *v));

    // --- splitters (ideal and realistic) ---
    const auto forbid = [&](const char* key) {
        if (file.take(key))
            throw ConfigError("config key '" + std::string(key) + "' has no effect with model=" +
                              to_string(model));
    };
    if (ideal || realistic) {
        if (const auto v = file.take("bs.t_sq")) {
            const double t_sq = detail::parse_double("bs.t_sq", *v);
            config.base.bs1 = BeamSplitterParams::from_transmittance(t_sq);
            config.base.bs2 = BeamSplitterParams::from_transmittance(t_sq);
        }
        if (const auto v = file.take("bs1.t_sq"))
            config.base.bs1 =
                BeamSplitterParams::from_transmittance(detail::parse_double("bs1.t_sq", *v));
        if (const auto v = file.take("bs2.t_sq"))
            config.base.bs2 =
                BeamSplitterParams::from_transmittance(detail::parse_double("bs2.t_sq", *v));
    } else {
        forbid("bs.t_sq"), forbid("bs1.t_sq"), forbid("bs2.t_sq");
    }

    // --- source and detectors (realistic only) ---
    if (realistic) {
        double gamma_sq = config.base.source.gamma * config.base.source.gamma;
        double pump_phase = config.base.source.pump_phase;
        int pair_cutoff = config.base.source.pair_cutoff;
        if (const auto v = file.take("source.gamma_sq"))
            gamma_sq = detail::parse_double("source.gamma_sq", *v);
        if (const auto v = file.take("source.pump_phase"))
            pump_phase = detail::parse_double("source.pump_phase", *v);
        if (const auto v = file.take("source.pair_cutoff"))
            pair_cutoff = detail::parse_int("source.pair_cutoff", *v);
        config.base.source = SpdcParams::from_pair_probability(gamma_sq, pump_phase, pair_cutoff);

        const auto read_detector = [&](const char* slot, DetectorModel& d) {
            const std::string base = std::string("detectors.") + slot + ".";
            DetectorKind kind = d.kind;
            double eta = d.eta, r_dark = d.r_dark, tau_res = d.tau_res;
            if (const auto v = file.take(base + "kind")) kind = detail::parse_kind(base + "kind", *v);
            if (const auto v = file.take(base + "eta"))
                eta = detail::parse_double(base + "eta", *v);
            if (const auto v = file.take(base + "r_dark"))
                r_dark = detail::parse_double(base + "r_dark", *v);
            if (const auto v = file.take(base + "tau_res"))
                tau_res = detail::parse_double(base + "tau_res", *v);
            d = DetectorModel::make(kind, eta, r_dark, tau_res);
        };
        read_detector("d1", config.base.d1);
        read_detector("d2", config.base.d2);
        read_detector("d3", config.base.d3);
        if (const auto v = file.take("detectors.eta")) {
            const double eta = detail::parse_double("detectors.eta", *v);
            detail::apply_parameter(config.base, "detectors.eta", eta);
        }
        if (const auto v = file.take("detectors.r_dark")) {
            const double r = detail::parse_double("detectors.r_dark", *v);
            detail::apply_parameter(config.base, "detectors.r_dark", r);
        }
        if (const auto v = file.take("rep_rate")) {
            config.base.rep_rate = detail::parse_double("rep_rate", *v);
            if (config.base.rep_rate <= 0.0) throw ConfigError("rep_rate must be > 0");
        }
    } else {
        for (const char* slot : {"d1", "d2", "d3"})
            for (const char* field : {"kind", "eta", "r_dark", "tau_res"})
                forbid(("detectors." + std::string(slot) + "." + field).c_str());
        forbid("detectors.eta"), forbid("detectors.r_dark");
        forbid("source.gamma_sq"), forbid("source.pump_phase"), forbid("source.pair_cutoff");
        forbid("rep_rate");
    }

    // --- conditioning ---
    if (realistic) {
        const auto pattern = file.take("pattern");
        const auto pattern_choices = file.take("pattern_choices");
        const auto strategy = file.take("strategy");
        const auto strategy_choices = file.take("strategy_choices");
        const int given = int(bool(pattern)) + int(bool(pattern_choices)) + int(bool(strategy)) +
                          int(bool(strategy_choices));
        if (given > 1)
            throw ConfigError("config: give at most one of pattern, pattern_choices, strategy, "
                              "strategy_choices");
        if (pattern) {
            config.patterns = {detail::parse_pattern("pattern", *pattern)};
        } else if (pattern_choices) {
            for (const auto& part : detail::split(*pattern_choices, ';'))
                config.patterns.push_back(detail::parse_pattern("pattern_choices", part));
            if (config.patterns.empty())
                throw ConfigError("config: pattern_choices is empty");
        } else if (strategy) {
            config.strategies = {detail::parse_strategy("strategy", *strategy)};
        } else if (strategy_choices) {
            for (const auto& part : detail::split(*strategy_choices, ','))
                config.strategies.push_back(detail::parse_strategy("strategy_choices", part));
            if (config.strategies.empty())
                throw ConfigError("config: strategy_choices is empty");
        } else {
            config.patterns = {ClickPattern{1, 1, 0}};
        }
        forbid("outcome");
    } else {
        forbid("pattern"), forbid("pattern_choices");
        forbid("strategy"), forbid("strategy_choices");
        if (ideal) {
            if (const auto v = file.take("outcome")) {
                const std::string o = detail::trim(*v);
                if (o == "1,0")
                    config.outcome = IdealOutcome::SingleAtD2;
                else if (o == "0,1")
                    config.outcome = IdealOutcome::SingleAtD3;
                else
                    throw ConfigError("config key 'outcome': expected '1,0' or '0,1'");
            }
        } else {
            forbid("outcome");
        }
    }

    if (model == RunModel::Coherent) {
        if (const auto v = file.take("baseline.xi")) {
            config.baseline_xi = detail::parse_double("baseline.xi", *v);
            if (config.baseline_xi < 0.0 || config.baseline_xi > 1.0)
                throw ConfigError("baseline.xi must lie in [0, 1]");
        }
        forbid("correction");
    } else {
        forbid("baseline.xi");
        if (const auto v = file.take("correction")) {
            const std::string c = detail::trim(*v);
            if (c == "auto")
                config.correction = CorrectionMode::Auto;
            else if (c == "on")
                config.correction = CorrectionMode::On;
            else if (c == "off")
                config.correction = CorrectionMode::Off;
            else
                throw ConfigError("config key 'correction': expected auto, on, or off");
        }
    }

    // --- observables ---
    const auto observables = file.take("observables");
    if (!observables) throw ConfigError("config: 'observables' is required");
    for (const auto& part : detail::split(*observables, ','))
        config.observables.push_back(parse_observable(part));
    if (config.observables.empty()) throw ConfigError("config: observables list is empty");
    for (const auto& obs : config.observables) {
        if (obs.kind == ObservableKind::Rate && !realistic)
            throw ConfigError("observable 'rate' requires model=realistic");
        if (obs.kind == ObservableKind::Probability && model == RunModel::Coherent)
            throw ConfigError("observable 'probability' requires model=realistic or ideal");
    }

    // --- axes ---
    config.axis1 = detail::parse_axis(file, "sweep", model);
    config.axis2 = detail::parse_axis(file, "sweep2", model);
    if (!config.axis1 && config.axis2)
        throw ConfigError("config: 'sweep2' given without 'sweep'");
    if (config.axis1 && config.axis2 && config.axis1->parameter == config.axis2->parameter)
        throw ConfigError("config: sweep and sweep2 vary the same parameter");

    // --- phase-space controls ---
    if (const auto v = file.take("grid.x_min")) config.grid.x_min = detail::parse_double("grid.x_min", *v);
    if (const auto v = file.take("grid.x_max")) config.grid.x_max = detail::parse_double("grid.x_max", *v);
    if (const auto v = file.take("grid.p_min")) config.grid.p_min = detail::parse_double("grid.p_min", *v);
    if (const auto v = file.take("grid.p_max")) config.grid.p_max = detail::parse_double("grid.p_max", *v);
    if (const auto v = file.take("grid.nx")) config.grid.nx = detail::parse_int("grid.nx", *v);
    if (const auto v = file.take("grid.np")) config.grid.np = detail::parse_int("grid.np", *v);
    config.grid.validate();
    if (const auto v = file.take("phase.n_radial")) {
        config.phase_n_radial = detail::parse_int("phase.n_radial", *v);
        if (config.phase_n_radial < 2) throw ConfigError("phase.n_radial must be >= 2");
    }
    if (const auto v = file.take("phase.n_theta")) {
        config.phase_n_theta = detail::parse_int("phase.n_theta", *v);
        if (config.phase_n_theta < 4) throw ConfigError("phase.n_theta must be >= 4");
    }

    file.expect_exhausted();

    // Axis values must be applicable: rehearse them on a scratch config.
    for (const auto* axis : {&config.axis1, &config.axis2}) {
        if (!axis->has_value()) continue;
        for (const double v : (*axis)->values) {
            QsdConfig scratch = config.base;
            detail::apply_parameter(scratch, (*axis)->parameter, v);
            scratch.validate();
        }
    }
    config.base.validate();
    return config;
}

inline SweepConfig parse_sweep_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sweep_config(buffer.str());
}

// Serialize the effective configuration in the same flat format the parser
// accepts; used for the metadata sidecar.
inline std::string serialize_sweep_config(const SweepConfig& config) {
    std::ostringstream out;
    const auto num = [](double v) { return detail::format_double(v); };
    out << "# generated by qsd " << kVersion << "\n";
    out << "model = " << to_string(config.model) << "\n";
    out << "alpha.magnitude_sq = " << num(std::norm(config.base.alpha)) << "\n";
    out << "alpha.phase = " << num(std::arg(config.base.alpha)) << "\n";
    out << "cutoff.n_max = " << config.base.cutoff.n_max << "\n";
    if (config.model != RunModel::Coherent) {
        out << "bs1.t_sq = " << num(std::norm(config.base.bs1.t)) << "\n";
        out << "bs2.t_sq = " << num(std::norm(config.base.bs2.t)) << "\n";
    }
    if (config.model == RunModel::Realistic) {
        out << "source.gamma_sq = " << num(config.base.source.gamma * config.base.source.gamma)
            << "\n";
        out << "source.pump_phase = " << num(config.base.source.pump_phase) << "\n";
        out << "source.pair_cutoff = " << config.base.source.pair_cutoff << "\n";
        const auto write_detector = [&](const char* slot, const DetectorModel& d) {
            const std::string base = std::string("detectors.") + slot + ".";
            out << base << "kind = " << to_string(d.kind) << "\n";
            out << base << "eta = " << num(d.eta) << "\n";
            out << base << "r_dark = " << num(d.r_dark) << "\n";
            out << base << "tau_res = " << num(d.tau_res) << "\n";
        };
        write_detector("d1", config.base.d1);
        write_detector("d2", config.base.d2);
        write_detector("d3", config.base.d3);
        out << "rep_rate = " << num(config.base.rep_rate) << "\n";
        if (config.uses_strategies()) {
            out << "strategy_choices = ";
            for (size_t i = 0; i < config.strategies.size(); ++i)
                out << (i ? ", " : "") << to_string(config.strategies[i]);
            out << "\n";
        } else {
            out << "pattern_choices = ";
            for (size_t i = 0; i < config.patterns.size(); ++i) {
                const auto& p = config.patterns[i];
                out << (i ? "; " : "") << p.n1 << "," << p.n2 << "," << p.n3;
            }
            out << "\n";
        }
    }
    if (config.model == RunModel::Ideal)
        out << "outcome = " << (config.outcome == IdealOutcome::SingleAtD2 ? "1,0" : "0,1")
            << "\n";
    if (config.model == RunModel::Coherent) {
        out << "baseline.xi = " << num(config.baseline_xi) << "\n";
    } else {
        const char* c = config.correction == CorrectionMode::Auto
                            ? "auto"
                            : config.correction == CorrectionMode::On ? "on" : "off";
        out << "correction = " << c << "\n";
    }
    out << "observables = ";
    for (size_t i = 0; i < config.observables.size(); ++i) {
        const auto& obs = config.observables[i];
        out << (i ? ", " : "");
        if (obs.kind == ObservableKind::FidelityAttenuated)
            out << "fidelity_attenuated:" << num(obs.xi);
        else
            out << obs.label;
    }
    out << "\n";
    const auto write_axis = [&](const char* prefix, const SweepAxis& axis) {
        out << prefix << ".parameter = " << axis.parameter << "\n";
        out << prefix << ".values = ";
        for (size_t i = 0; i < axis.values.size(); ++i)
            out << (i ? ", " : "") << num(axis.values[i]);
        out << "\n";
    };
    if (config.axis1) write_axis("sweep", *config.axis1);
    if (config.axis2) write_axis("sweep2", *config.axis2);
    if (config.has_field_observables()) {
        out << "grid.x_min = " << num(config.grid.x_min) << "\n";
        out << "grid.x_max = " << num(config.grid.x_max) << "\n";
        out << "grid.p_min = " << num(config.grid.p_min) << "\n";
        out << "grid.p_max = " << num(config.grid.p_max) << "\n";
        out << "grid.nx = " << config.grid.nx << "\n";
        out << "grid.np = " << config.grid.np << "\n";
        out << "phase.n_radial = " << config.phase_n_radial << "\n";
        out << "phase.n_theta = " << config.phase_n_theta << "\n";
    }
    return out.str();
}

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::string stem = "sweep";
    int threads = 1; // advisory; evaluation is serial for reproducibility
};

namespace detail {

// Evaluated quantities of one grid point.
struct RowResult {
    std::optional<TruncationResult> pipeline;
    QsdConfig config;
};

inline DensityOperator row_state(const SweepConfig& sweep, RowResult& row) {
    switch (sweep.model) {
        case RunModel::Realistic: return row.pipeline->state;
        case RunModel::Ideal:
            return projector(ideal_truncated_state(row.config.alpha, row.config.bs1,
                                                   row.config.bs2, sweep.outcome,
                                                   sweep.correction, row.config.cutoff));
        case RunModel::Coherent:
            return projector(
                coherent_state(attenuate(row.config.alpha, sweep.baseline_xi), row.config.cutoff));
    }
    throw UsageError("row_state: unknown model");
}

inline double scalar_observable(const SweepConfig& sweep, RowResult& row, const Observable& obs) {
    const QsdConfig& cfg = row.config;
    switch (obs.kind) {
        case ObservableKind::Fidelity:
            if (sweep.model == RunModel::Realistic) return row.pipeline->fidelity_to_desired;
            if (sweep.model == RunModel::Ideal)
                return ideal_fidelity(cfg.alpha, cfg.bs1, cfg.bs2, sweep.outcome,
                                      sweep.correction);
            return fidelity_attenuated(cfg.alpha, sweep.baseline_xi);
        case ObservableKind::Probability:
            if (sweep.model == RunModel::Realistic) return row.pipeline->probability_per_pulse;
            return ideal_detection_probability(cfg.alpha, cfg.bs1, cfg.bs2, sweep.outcome);
        case ObservableKind::Rate: return row.pipeline->rate_per_second;
        case ObservableKind::FidelityDephased: return fidelity_dephased(cfg.alpha);
        case ObservableKind::FidelityAttenuated: return fidelity_attenuated(cfg.alpha, obs.xi);
        case ObservableKind::FidelityAttenuatedOptimal:
            return fidelity_attenuated_optimal(cfg.alpha);
        default: throw UsageError("scalar_observable: not a scalar observable");
    }
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
        for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

  private:
    std::ofstream out_;
};

} // namespace detail

// Evaluate the sweep and write CSV outputs plus the metadata sidecar.
// Returns the written paths.  Row order follows the declared grid order:
// axis1 slowest, then axis2, then the choice axis.
inline std::vector<std::filesystem::path> run_sweep(const SweepConfig& sweep,
                                                    const RunOptions& options) {
    namespace fs = std::filesystem;
    if (options.threads < 1) throw ConfigError("threads must be >= 1");
    fs::create_directories(options.out_dir);

    // Label columns shared by every output file.
    std::vector<std::string> label_columns;
    if (sweep.axis1) label_columns.push_back(sweep.axis1->parameter);
    if (sweep.axis2) label_columns.push_back(sweep.axis2->parameter);
    const bool realistic = sweep.model == RunModel::Realistic;
    if (realistic) label_columns.push_back(sweep.uses_strategies() ? "strategy" : "pattern");

    std::vector<std::string> scalar_columns = label_columns;
    for (const auto& obs : sweep.observables)
        if (!obs.is_field()) scalar_columns.push_back(obs.label);
    if (realistic && sweep.has_scalar_observables())
        scalar_columns.push_back("correction_applied");

    std::vector<fs::path> written;
    const auto path_for = [&](const std::string& suffix) {
        fs::path p = options.out_dir / (options.stem + suffix);
        written.push_back(p);
        return p;
    };

    std::optional<detail::CsvWriter> scalar_csv;
    if (sweep.has_scalar_observables())
        scalar_csv.emplace(path_for(".csv"), scalar_columns);

    std::optional<detail::CsvWriter> wigner_csv, phase_csv, marginals_csv;
    for (const auto& obs : sweep.observables) {
        std::vector<std::string> cols = label_columns;
        if (obs.kind == ObservableKind::Wigner && !wigner_csv) {
            cols.insert(cols.end(), {"x", "p", "w"});
            wigner_csv.emplace(path_for("_wigner.csv"), cols);
        } else if (obs.kind == ObservableKind::PhaseDist && !phase_csv) {
            cols.insert(cols.end(), {"theta", "p_theta"});
            phase_csv.emplace(path_for("_phase_dist.csv"), cols);
        } else if (obs.kind == ObservableKind::Marginals && !marginals_csv) {
            cols.insert(cols.end(), {"axis", "coordinate", "value"});
            marginals_csv.emplace(path_for("_marginals.csv"), cols);
        }
    }

    const size_t n1 = sweep.axis1 ? sweep.axis1->values.size() : 1;
    const size_t n2 = sweep.axis2 ? sweep.axis2->values.size() : 1;
    const size_t nc = realistic
                          ? (sweep.uses_strategies() ? sweep.strategies.size()
                                                     : sweep.patterns.size())
                          : 1;

    for (size_t i1 = 0; i1 < n1; ++i1) {
        for (size_t i2 = 0; i2 < n2; ++i2) {
            for (size_t ic = 0; ic < nc; ++ic) {
                detail::RowResult row{std::nullopt, sweep.base};
                std::vector<std::string> labels;
                if (sweep.axis1) {
                    const double v = sweep.axis1->values[i1];
                    detail::apply_parameter(row.config, sweep.axis1->parameter, v);
                    labels.push_back(detail::format_double(v));
                }
                if (sweep.axis2) {
                    const double v = sweep.axis2->values[i2];
                    detail::apply_parameter(row.config, sweep.axis2->parameter, v);
                    labels.push_back(detail::format_double(v));
                }
                if (realistic) {
                    const bool needs_pipeline = sweep.has_field_observables() ||
                                                [&] {
                                                    for (const auto& obs : sweep.observables)
                                                        if (obs.kind == ObservableKind::Fidelity ||
                                                            obs.kind == ObservableKind::Probability ||
                                                            obs.kind == ObservableKind::Rate)
                                                            return true;
                                                    return false;
                                                }();
                    if (sweep.uses_strategies()) {
                        const Strategy s = sweep.strategies[ic];
                        labels.push_back(to_string(s));
                        if (needs_pipeline)
                            row.pipeline = run_strategy(row.config, s, sweep.correction);
                    } else {
                        const ClickPattern& p = sweep.patterns[ic];
                        labels.push_back(detail::pattern_label(p));
                        if (needs_pipeline)
                            row.pipeline = realistic_truncation(row.config, p, sweep.correction);
                    }
                }

                if (scalar_csv) {
                    std::vector<std::string> cells = labels;
                    for (const auto& obs : sweep.observables)
                        if (!obs.is_field())
                            cells.push_back(
                                detail::format_double(detail::scalar_observable(sweep, row, obs)));
                    if (realistic)
                        cells.push_back(row.pipeline && row.pipeline->correction_applied ? "1"
                                                                                         : "0");
                    scalar_csv->row(cells);
                }

                if (sweep.has_field_observables()) {
                    const DensityOperator state = detail::row_state(sweep, row);
                    for (const auto& obs : sweep.observables) {
                        if (obs.kind == ObservableKind::Wigner) {
                            const Eigen::MatrixXd field = wigner(state, sweep.grid);
                            for (int i = 0; i < sweep.grid.nx; ++i)
                                for (int j = 0; j < sweep.grid.np; ++j) {
                                    std::vector<std::string> cells = labels;
                                    cells.push_back(detail::format_double(sweep.grid.x_at(i)));
                                    cells.push_back(detail::format_double(sweep.grid.p_at(j)));
                                    cells.push_back(detail::format_double(field(i, j)));
                                    wigner_csv->row(cells);
                                }
                        } else if (obs.kind == ObservableKind::PhaseDist) {
                            const auto rule = QuadratureRule::for_cutoff(
                                state.indexer.cutoff(), sweep.phase_n_radial,
                                sweep.phase_n_theta);
                            const PhaseDistribution dist =
                                wigner_phase_distribution(state, rule);
                            for (size_t k = 0; k < dist.theta.size(); ++k) {
                                std::vector<std::string> cells = labels;
                                cells.push_back(detail::format_double(dist.theta[k]));
                                cells.push_back(detail::format_double(dist.value[k]));
                                phase_csv->row(cells);
                            }
                        } else if (obs.kind == ObservableKind::Marginals) {
                            for (const MarginalAxis axis :
                                 {MarginalAxis::XAtP0, MarginalAxis::PAtX0,
                                  MarginalAxis::IntegrateP, MarginalAxis::IntegrateX}) {
                                const MarginalCurve curve =
                                    wigner_marginals(state, axis, sweep.grid);
                                for (size_t k = 0; k < curve.coordinate.size(); ++k) {
                                    std::vector<std::string> cells = labels;
                                    cells.push_back(to_string(axis));
                                    cells.push_back(
                                        detail::format_double(curve.coordinate[k]));
                                    cells.push_back(detail::format_double(curve.value[k]));
                                    marginals_csv->row(cells);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    std::ofstream meta(options.out_dir / (options.stem + ".meta"), std::ios::binary);
    if (!meta)
        throw std::runtime_error("cannot write '" +
                                 (options.out_dir / (options.stem + ".meta")).string() + "'");
    meta << serialize_sweep_config(sweep);
    written.push_back(options.out_dir / (options.stem + ".meta"));
    return written;
}

} // namespace qsd
