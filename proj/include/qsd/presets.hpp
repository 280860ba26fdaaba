#pragma once

// Canned sweep configurations ("figure presets") reproducing the standard
// result set of the device: fidelity/probability surfaces, detector-model
// comparisons, strategy comparisons, baselines, Wigner functions, and phase
// distributions.  Each preset is one or more named sweep runs; `qsd figure
// <id>` executes them and writes `<stem>.csv` (+ sidecars) per run.

#include <string>
#include <vector>

#include "qsd/sweep.hpp"

namespace qsd {

struct PresetRun {
    std::string stem;
    SweepConfig config;
};

struct FigurePreset {
    std::string id;
    std::string description;
    std::vector<PresetRun> runs;
};

namespace detail {

inline std::vector<double> value_range(double from, double to, double step) {
    std::vector<double> values;
    for (int k = 0;; ++k) {
        const double v = from + step * double(k);
        if (v > to + step * 1e-9) break;
        values.push_back(v);
    }
    return values;
}

inline SweepAxis axis(const std::string& parameter, std::vector<double> values) {
    return SweepAxis{parameter, std::move(values)};
}

inline std::vector<Observable> observables(const std::vector<std::string>& specs) {
    std::vector<Observable> parsed;
    for (const auto& spec : specs) parsed.push_back(parse_observable(spec));
    return parsed;
}

inline SweepConfig ideal_base(double magnitude_sq, double phase = 0.0) {
    SweepConfig config;
    config.model = RunModel::Ideal;
    config.base = QsdConfig::standard();
    config.base.alpha = std::polar(std::sqrt(magnitude_sq), phase);
    return config;
}

inline SweepConfig realistic_base(DetectorKind kind, double eta, double r_dark,
                                  double magnitude_sq = 1.0, double phase = 0.0) {
    SweepConfig config;
    config.model = RunModel::Realistic;
    config.base = QsdConfig::standard();
    config.base.alpha = std::polar(std::sqrt(magnitude_sq), phase);
    const DetectorModel d = DetectorModel::make(kind, eta, r_dark, 1e-8);
    config.base.d1 = d, config.base.d2 = d, config.base.d3 = d;
    config.patterns = {ClickPattern{1, 1, 0}};
    return config;
}

inline std::vector<FigurePreset> build_figure_presets() {
    std::vector<FigurePreset> presets;
    const std::vector<double> intensity_range = value_range(0.05, 4.0, 0.05);
    const double half_pi = 1.5707963267948966;

    { // fig2a: ideal fidelity over both transmittances
        SweepConfig c = ideal_base(1.0);
        c.observables = observables({"fidelity"});
        c.axis1 = axis("bs1.t_sq", value_range(0.025, 0.975, 0.025));
        c.axis2 = axis("bs2.t_sq", value_range(0.025, 0.975, 0.025));
        presets.push_back({"fig2a",
                           "ideal-scheme fidelity surface over (|t1|^2, |t2|^2) at |alpha|^2 = 1",
                           {{"fig2a", c}}});
    }
    { // fig2b: ideal detection probability vs common transmittance
        SweepConfig c = ideal_base(1.0);
        c.observables = observables({"probability"});
        c.axis1 = axis("bs.t_sq", value_range(0.0, 1.0, 0.01));
        c.axis2 = axis("alpha.magnitude_sq", {0.1, 0.5, 1.0, 1.5, 2.0});
        presets.push_back({"fig2b",
                           "ideal-scheme detection probability vs |t|^2 (t1 = t2) for several "
                           "input intensities",
                           {{"fig2b", c}}});
    }
    { // fig4: photon-number-discriminating detectors
        SweepConfig left = realistic_base(DetectorKind::Pndc, 0.5, 1000.0);
        left.patterns = {ClickPattern{1, 1, 0}, ClickPattern{1, 2, 1}, ClickPattern{1, 3, 2}};
        left.observables = observables({"fidelity"});
        left.axis1 = axis("alpha.magnitude_sq", intensity_range);

        SweepConfig right = realistic_base(DetectorKind::Pndc, 0.5, 100.0, 0.4);
        right.patterns = left.patterns;
        right.observables = observables({"fidelity"});
        right.axis1 = axis("detectors.eta", value_range(0.0, 1.0, 0.02));
        right.axis2 = axis("detectors.r_dark", {100.0, 10000.0});

        presets.push_back({"fig4a",
                           "number-discriminating detectors: fidelity vs input intensity for "
                           "count patterns 1:1:0, 1:2:1, 1:3:2 (eta = 0.5, dark rate 1000/s)",
                           {{"fig4a", left}}});
        presets.push_back({"fig4b",
                           "number-discriminating detectors: fidelity vs efficiency at "
                           "|alpha|^2 = 0.4 for dark rates 100/s and 10^4/s",
                           {{"fig4b", right}}});
        presets.push_back({"fig4",
                           "number-discriminating detectors: fidelity vs intensity and vs "
                           "efficiency (both panels)",
                           {{"fig4a", left}, {"fig4b", right}}});
    }
    { // fig5: conventional photon counters
        SweepConfig c = realistic_base(DetectorKind::Cpc, 0.7, 100.0);
        c.observables = observables({"fidelity", "probability", "rate"});
        c.axis1 = axis("alpha.magnitude_sq", intensity_range);
        c.axis2 = axis("detectors.eta", {0.0, 0.1, 0.3, 0.5, 0.7, 1.0});
        presets.push_back({"fig5",
                           "conventional counters (dark rate 100/s): fidelity and detection "
                           "rate vs input intensity for several efficiencies",
                           {{"fig5", c}}});
    }
    { // fig6: single-photon counters
        SweepConfig c = realistic_base(DetectorKind::Spc, 0.7, 1e4);
        c.observables = observables({"fidelity", "probability", "rate"});
        c.axis1 = axis("alpha.magnitude_sq", intensity_range);
        c.axis2 = axis("detectors.eta", {0.0, 0.1, 0.3, 0.5, 0.7, 1.0});
        presets.push_back({"fig6",
                           "single-photon counters (dark rate 10^4/s): fidelity and detection "
                           "rate vs input intensity for several efficiencies",
                           {{"fig6", c}}});
    }
    { // fig7: detector strategies a-d
        SweepConfig c = realistic_base(DetectorKind::Cpc, 0.7, 100.0);
        c.patterns.clear();
        c.strategies = {Strategy::A, Strategy::B, Strategy::C, Strategy::D};
        c.observables = observables({"fidelity", "probability", "rate"});
        c.axis1 = axis("alpha.magnitude_sq", intensity_range);
        presets.push_back({"fig7",
                           "detector strategies a-d (mixed counter kinds): fidelity and "
                           "detection rate vs input intensity",
                           {{"fig7", c}}});
    }
    { // fig8: scheme vs dephased and unit-attenuation baselines
        SweepConfig c = realistic_base(DetectorKind::Cpc, 0.7, 100.0);
        c.observables = observables({"fidelity", "fidelity_dephased", "fidelity_attenuated:1"});
        c.axis1 = axis("alpha.magnitude_sq", intensity_range);
        c.axis2 = axis("detectors.eta", {1.0, 0.5});
        presets.push_back({"fig8",
                           "truncation fidelity vs input intensity compared with the dephased "
                           "and undamped coherent baselines",
                           {{"fig8", c}}});
    }
    { // fig9: scheme vs optimal/fixed attenuated baselines
        SweepConfig c = realistic_base(DetectorKind::Cpc, 0.7, 100.0);
        c.observables = observables({"fidelity", "fidelity_attenuated_optimal",
                                     "fidelity_attenuated:0.5", "fidelity_attenuated:1"});
        c.axis1 = axis("alpha.magnitude_sq", intensity_range);
        c.axis2 = axis("detectors.eta", {1.0, 0.7, 0.5});
        presets.push_back({"fig9",
                           "truncation fidelity vs input intensity compared with attenuated "
                           "coherent baselines (optimal, half, and unit attenuation)",
                           {{"fig9", c}}});
    }
    { // fig10: Wigner functions of the truncated state
        SweepConfig a = ideal_base(0.8, half_pi);
        a.observables = observables({"wigner"});

        SweepConfig b = realistic_base(DetectorKind::Cpc, 0.7, 100.0, 0.8, half_pi);
        b.observables = observables({"wigner"});

        presets.push_back({"fig10a",
                           "Wigner function of the ideal truncated state for |alpha|^2 = 0.8, "
                           "phase pi/2",
                           {{"fig10a", a}}});
        presets.push_back({"fig10b",
                           "Wigner function of the realistic truncated state (conventional "
                           "counters, eta = 0.7) for |alpha|^2 = 0.8, phase pi/2",
                           {{"fig10b", b}}});
        presets.push_back({"fig10", "Wigner functions of the truncated state (both panels)",
                           {{"fig10a", a}, {"fig10b", b}}});
    }
    { // fig11: Wigner cross sections and marginals
        SweepConfig ideal = ideal_base(1.0);
        ideal.observables = observables({"marginals"});
        ideal.axis1 = axis("alpha.magnitude_sq", {0.4, 4.0});

        SweepConfig device = realistic_base(DetectorKind::Cpc, 0.7, 100.0);
        device.observables = observables({"marginals"});
        device.axis1 = axis("alpha.magnitude_sq", {0.4, 4.0});
        device.axis2 = axis("detectors.eta", {0.5, 0.7, 1.0});

        presets.push_back({"fig11",
                           "Wigner cross sections and marginal distributions at |alpha|^2 = "
                           "0.4 and 4.0 for the ideal and realistic truncated states",
                           {{"fig11_ideal", ideal}, {"fig11_qsd", device}}});
    }
    { // fig12: phase distributions
        const auto phase_runs = [&](double magnitude_sq, const std::string& stem) {
            SweepConfig input;
            input.model = RunModel::Coherent;
            input.base = QsdConfig::standard();
            input.base.alpha = std::sqrt(magnitude_sq);
            input.observables = observables({"phase_dist"});

            SweepConfig ideal = ideal_base(magnitude_sq);
            ideal.observables = observables({"phase_dist"});

            SweepConfig device = realistic_base(DetectorKind::Cpc, 0.7, 100.0, magnitude_sq);
            device.observables = observables({"phase_dist"});
            device.axis1 = axis("detectors.eta", {1.0, 0.5, 0.2});

            return std::vector<PresetRun>{{stem + "_input", input},
                                          {stem + "_ideal", ideal},
                                          {stem + "_qsd", device}};
        };
        const auto a = phase_runs(1.0, "fig12a");
        const auto b = phase_runs(0.4, "fig12b");
        presets.push_back({"fig12a",
                           "phase distributions at |alpha|^2 = 1.0: input coherent state, "
                           "ideal truncation, and realistic truncation at several efficiencies",
                           a});
        presets.push_back({"fig12b",
                           "phase distributions at |alpha|^2 = 0.4: input coherent state, "
                           "ideal truncation, and realistic truncation at several efficiencies",
                           b});
        std::vector<PresetRun> both = a;
        both.insert(both.end(), b.begin(), b.end());
        presets.push_back({"fig12", "phase distributions at |alpha|^2 = 1.0 and 0.4", both});
    }
    return presets;
}

} // namespace detail

inline const std::vector<FigurePreset>& figure_presets() {
    static const std::vector<FigurePreset> presets = detail::build_figure_presets();
    return presets;
}

inline const FigurePreset* find_figure_preset(const std::string& id) {
    for (const auto& preset : figure_presets())
        if (preset.id == id) return &preset;
    return nullptr;
}

// Run every sweep of a preset into `out_dir`; returns all written paths.
inline std::vector<std::filesystem::path> run_figure_preset(const FigurePreset& preset,
                                                            const std::filesystem::path& out_dir,
                                                            int threads = 1) {
    std::vector<std::filesystem::path> written;
    for (const auto& run : preset.runs) {
        RunOptions options;
        options.out_dir = out_dir;
        options.stem = run.stem;
        options.threads = threads;
        const auto paths = run_sweep(run.config, options);
        written.insert(written.end(), paths.begin(), paths.end());
    }
    return written;
}

} // namespace qsd
