#pragma once

// End-to-end truncation device.  An input coherent state meets the
// heralded single photon from a pair source on two beam splitters; photon
// counting on two output ports plus the herald conditions the remaining
// port on a click pattern.  Both the ideal analytic path (perfect
// counters, exactly one pair) and the realistic density-matrix path
// (lossy, dark-counting detectors and a multi-pair source) are provided.
//
// Mode bookkeeping: the pair source emits into (a1, c1) with c1 watched by
// the gating detector D1.  BS1 mixes a1 with the vacuum port a2 into
// (b1, b2); BS2 mixes the coherent input b3 (first input) with b2 into
// (c3, c2).  D2 watches c2, D3 watches c3, and b1 carries the truncated
// state.

#include <cmath>
#include <span>
#include <utility>

#include "qsd/detectors.hpp"
#include "qsd/fock.hpp"
#include "qsd/optics.hpp"

namespace qsd {

// Target of the whole device: the first two Fock amplitudes of the input,
// renormalized onto the {|0>, |1>} span.
inline PureState desired_state(Complex alpha, CutoffDim cutoff) {
    BasisIndexer indexer(1, cutoff);
    Vector amps = Vector::Zero(indexer.dim());
    const double scale = 1.0 / std::sqrt(1.0 + std::norm(alpha));
    amps[0] = scale;
    amps[1] = alpha * scale;
    return PureState(indexer, std::move(amps));
}

// The two single-photon outcomes of the ideal scheme, labeled by the
// counts (n2, n3) at D2 and D3.
enum class IdealOutcome { SingleAtD2, SingleAtD3 };

enum class CorrectionMode { Auto, On, Off };

// Outcome labels registered by (D1, D2, D3).  Labels follow each
// detector's own readout granularity: exact counts for number-resolving
// detectors, 0/1/2-or-more for single-photon counters, 0/1 = silent/click
// for click detectors.
struct ClickPattern {
    int n1 = 1;
    int n2 = 1;
    int n3 = 0;
};

// The conditioned state needs a sign flip on the odd Fock levels exactly
// when the counts at D3 exceed those at D2 by one.
inline bool correction_default(const ClickPattern& pattern) {
    return pattern.n3 == pattern.n2 + 1;
}

inline bool correction_default(IdealOutcome outcome) {
    return outcome == IdealOutcome::SingleAtD3;
}

// Sign flip of every odd Fock level of one mode (its own inverse).
inline PureState sigma_z_correct(const PureState& psi, int mode = 0) {
    if (mode < 0 || mode >= psi.indexer.mode_count())
        throw UsageError("sigma_z_correct: mode index out of range");
    PureState out = psi;
    for (std::int64_t i = 0; i < out.indexer.dim(); ++i)
        if (out.indexer.level_at(i, mode) % 2 == 1) out.amplitudes[i] = -out.amplitudes[i];
    return out;
}

inline DensityOperator sigma_z_correct(const DensityOperator& rho, int mode = 0) {
    if (mode < 0 || mode >= rho.indexer.mode_count())
        throw UsageError("sigma_z_correct: mode index out of range");
    DensityOperator out = rho;
    const std::int64_t dim = out.indexer.dim();
    for (std::int64_t i = 0; i < dim; ++i) {
        const int pi = out.indexer.level_at(i, mode) % 2;
        for (std::int64_t j = 0; j < dim; ++j) {
            const int pj = out.indexer.level_at(j, mode) % 2;
            if ((pi + pj) % 2 == 1) out.matrix(i, j) = -out.matrix(i, j);
        }
    }
    return out;
}

namespace detail {

// Unnormalized {|0>, |1>} amplitudes of the conditioned output in the
// ideal scheme (one input photon, perfect counters), including the
// coherent-state weight e^{-|alpha|^2/2} so that |c0|^2 + |c1|^2 is the
// outcome probability.
inline std::pair<Complex, Complex> ideal_amplitudes(Complex alpha, const BeamSplitterParams& bs1,
                                                    const BeamSplitterParams& bs2,
                                                    IdealOutcome outcome, bool corrected) {
    const double weight = std::exp(-0.5 * std::norm(alpha));
    Complex c0, c1;
    if (outcome == IdealOutcome::SingleAtD2) {
        c0 = std::conj(bs1.r * bs2.t);
        c1 = std::conj(bs2.r) * bs1.t * alpha;
    } else {
        c0 = std::conj(bs1.r) * bs2.r;
        c1 = -bs1.t * bs2.t * alpha;
    }
    if (corrected) c1 = -c1;
    return {weight * c0, weight * c1};
}

inline bool resolve_correction(CorrectionMode mode, bool auto_value) {
    switch (mode) {
        case CorrectionMode::Auto: return auto_value;
        case CorrectionMode::On: return true;
        case CorrectionMode::Off: return false;
    }
    return auto_value;
}

} // namespace detail

// Conditioned output of the ideal scheme, normalized, with the global
// phase fixed so the first nonvanishing amplitude is real positive.
inline PureState ideal_truncated_state(Complex alpha, const BeamSplitterParams& bs1,
                                       const BeamSplitterParams& bs2, IdealOutcome outcome,
                                       CorrectionMode correction = CorrectionMode::Auto,
                                       CutoffDim cutoff = CutoffDim{2}) {
    const bool corrected =
        detail::resolve_correction(correction, correction_default(outcome));
    const auto [c0, c1] = detail::ideal_amplitudes(alpha, bs1, bs2, outcome, corrected);
    if (std::norm(c0) + std::norm(c1) < 1e-300)
        throw DegenerateError("ideal_truncated_state: outcome has zero probability "
                              "for these splitter parameters");
    BasisIndexer indexer(1, cutoff);
    Vector amps = Vector::Zero(indexer.dim());
    amps[0] = c0;
    amps[1] = c1;
    PureState state(indexer, std::move(amps));
    state.normalize();
    for (std::int64_t i = 0; i < state.indexer.dim(); ++i) {
        const double mag = std::abs(state.amplitudes[i]);
        if (mag > 1e-12) {
            state.amplitudes *= std::conj(state.amplitudes[i]) / mag;
            break;
        }
    }
    return state;
}

// Overlap of the conditioned output with the target superposition, in
// closed form.
inline double ideal_fidelity(Complex alpha, const BeamSplitterParams& bs1,
                             const BeamSplitterParams& bs2,
                             IdealOutcome outcome = IdealOutcome::SingleAtD2,
                             CorrectionMode correction = CorrectionMode::Auto) {
    const bool corrected =
        detail::resolve_correction(correction, correction_default(outcome));
    const auto [c0, c1] = detail::ideal_amplitudes(alpha, bs1, bs2, outcome, corrected);
    const double norm_sq = std::norm(c0) + std::norm(c1);
    if (norm_sq < 1e-300)
        throw DegenerateError("ideal_fidelity: outcome has zero probability for these "
                              "splitter parameters");
    const double overlap = std::norm(c0 + std::conj(alpha) * c1);
    return overlap / (norm_sq * (1.0 + std::norm(alpha)));
}

// Probability of the outcome in the ideal scheme.
inline double ideal_detection_probability(Complex alpha, const BeamSplitterParams& bs1,
                                          const BeamSplitterParams& bs2,
                                          IdealOutcome outcome = IdealOutcome::SingleAtD2) {
    const auto [c0, c1] = detail::ideal_amplitudes(alpha, bs1, bs2, outcome, false);
    return std::norm(c0) + std::norm(c1);
}

// Full device configuration for the realistic path.
struct QsdConfig {
    Complex alpha = Complex(1.0, 0.0);
    BeamSplitterParams bs1 = BeamSplitterParams::fifty_fifty();
    BeamSplitterParams bs2 = BeamSplitterParams::fifty_fifty();
    SpdcParams source = SpdcParams::from_pair_probability(5e-4);
    DetectorModel d1 = DetectorModel::cpc();
    DetectorModel d2 = DetectorModel::cpc();
    DetectorModel d3 = DetectorModel::cpc();
    CutoffDim cutoff = CutoffDim{16};
    double rep_rate = 1e8;

    static QsdConfig standard() { return QsdConfig{}; }

    void validate() const {
        if (rep_rate <= 0.0) throw ConfigError("QsdConfig: rep_rate must be > 0");
        check_pair_cutoff(source, cutoff);
    }
};

struct TruncationResult {
    DensityOperator state;
    double probability_per_pulse = 0.0;
    double rate_per_second = 0.0;
    double fidelity_to_desired = 0.0;
    bool correction_applied = false;
};

namespace detail {

struct ConditionedOutput {
    Matrix rho;         // unnormalized single-mode output block
    double probability; // trace of rho
};

// Heart of the realistic path.  The phase-averaged source is diagonal in
// the pair number, so the conditioned output is the weighted sum over
// pair-number components; each component evolves as a pure three-mode
// state (b1 ⊗ c2 ⊗ c3 after the splitters), and the diagonal POVMs factor
// over the detected modes.  This equals conditioning the full four-mode
// input density operator, at a small fraction of the cost.
inline ConditionedOutput conditioned_output(const QsdConfig& config, const ClickPattern& pattern,
                                            std::span<const double> pair_weights) {
    config.validate();
    const CutoffDim cutoff = config.cutoff;
    const int n_max = cutoff.n_max;
    if (std::ssize(pair_weights) > n_max)
        throw ConfigError("conditioned_output: more pair weights than Fock levels");

    const PovmElement e1 = povm_element(config.d1, pattern.n1, cutoff);
    const PovmElement e2 = povm_element(config.d2, pattern.n2, cutoff);
    const PovmElement e3 = povm_element(config.d3, pattern.n3, cutoff);
    const PureState coherent = coherent_state(config.alpha, cutoff);

    const BasisIndexer indexer(3, cutoff);
    Matrix rho = Matrix::Zero(n_max, n_max);
    Vector column(n_max);
    for (int k = 0; k < std::ssize(pair_weights); ++k) {
        const double herald = pair_weights[k] * e1.diagonal[k];
        if (herald <= 0.0) continue;
        PureState psi(indexer, Vector::Zero(indexer.dim()));
        for (int n = 0; n < n_max; ++n)
            psi.amplitudes[indexer.flat_index({k, 0, n})] = coherent.amplitudes[n];
        psi = apply_beam_splitter(psi, 0, 1, config.bs1); // (a1, a2) -> (b1, b2)
        psi = apply_beam_splitter(psi, 2, 1, config.bs2); // (b3, b2) -> (c3, c2)
        for (int m2 = 0; m2 < n_max; ++m2) {
            if (e2.diagonal[m2] <= 0.0) continue;
            for (int m3 = 0; m3 < n_max; ++m3) {
                const double weight = herald * e2.diagonal[m2] * e3.diagonal[m3];
                if (weight <= 0.0) continue;
                for (int n = 0; n < n_max; ++n)
                    column[n] = psi.amplitudes[indexer.flat_index({n, m2, m3})];
                rho.noalias() += weight * column * column.adjoint();
            }
        }
    }
    const double probability = rho.trace().real();
    return ConditionedOutput{std::move(rho), probability};
}

} // namespace detail

// Probability per pulse of registering the click pattern, with an
// explicit pair-number distribution for the source.
inline double pattern_probability_with_source(const QsdConfig& config, const ClickPattern& pattern,
                                              std::span<const double> pair_weights) {
    return detail::conditioned_output(config, pattern, pair_weights).probability;
}

inline double pattern_probability(const QsdConfig& config, const ClickPattern& pattern) {
    const auto weights = spdc_pair_weights(config.source, config.cutoff);
    return pattern_probability_with_source(config, pattern, weights);
}

// Conditioned single-mode output for the click pattern, with an explicit
// pair-number distribution for the source.
inline TruncationResult realistic_truncation_with_source(
    const QsdConfig& config, const ClickPattern& pattern, std::span<const double> pair_weights,
    CorrectionMode correction = CorrectionMode::Auto) {
    auto conditioned = detail::conditioned_output(config, pattern, pair_weights);
    if (conditioned.probability < 1e-300)
        throw DegenerateError("realistic_truncation: click pattern (" +
                              std::to_string(pattern.n1) + ", " + std::to_string(pattern.n2) +
                              ", " + std::to_string(pattern.n3) +
                              ") has zero probability under this configuration");
    const bool corrected =
        detail::resolve_correction(correction, correction_default(pattern));
    DensityOperator state(BasisIndexer(1, config.cutoff),
                          conditioned.rho / conditioned.probability);
    if (corrected) state = sigma_z_correct(state);
    const double fidelity = fidelity_to_pure(state, desired_state(config.alpha, config.cutoff));
    return TruncationResult{std::move(state), conditioned.probability,
                            conditioned.probability * config.rep_rate, fidelity, corrected};
}

inline TruncationResult realistic_truncation(const QsdConfig& config, const ClickPattern& pattern,
                                             CorrectionMode correction = CorrectionMode::Auto) {
    const auto weights = spdc_pair_weights(config.source, config.cutoff);
    return realistic_truncation_with_source(config, pattern, weights, correction);
}

inline double detection_rate(const TruncationResult& result, const QsdConfig& config) {
    return result.probability_per_pulse * config.rep_rate;
}

// Detector-choice strategies: which counter kind gates on the herald (D1)
// and which counts the single photon (D2).  The kind of D3 has no visible
// effect on the output fidelity, so it is pinned to a click detector.
enum class Strategy { A, B, C, D };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::A: return "a";
        case Strategy::B: return "b";
        case Strategy::C: return "c";
        case Strategy::D: return "d";
    }
    return "?";
}

// Detector assignment for the strategy.  Each slot keeps its configured
// efficiency and resolving time but takes the kind and the kind's
// characteristic dark count rate (click counters are quiet, single-photon
// counters run about a hundred times darker).
inline QsdConfig strategy_config(QsdConfig config, Strategy strategy) {
    const DetectorKind cpc = DetectorKind::Cpc;
    const DetectorKind spc = DetectorKind::Spc;
    DetectorKind k1 = cpc, k2 = cpc;
    switch (strategy) {
        case Strategy::A: k1 = cpc, k2 = spc; break;
        case Strategy::B: k1 = cpc, k2 = cpc; break;
        case Strategy::C: k1 = spc, k2 = spc; break;
        case Strategy::D: k1 = spc, k2 = cpc; break;
    }
    const auto assign = [](DetectorKind kind, const DetectorModel& base) {
        const double r_dark = kind == DetectorKind::Spc ? 1e4 : 100.0;
        return DetectorModel::make(kind, base.eta, r_dark, base.tau_res);
    };
    config.d1 = assign(k1, config.d1);
    config.d2 = assign(k2, config.d2);
    config.d3 = assign(cpc, config.d3);
    return config;
}

// Run the device with the strategy's detector assignment, conditioning on
// the herald click, one count at D2, and silence at D3.
inline TruncationResult run_strategy(const QsdConfig& config, Strategy strategy,
                                     CorrectionMode correction = CorrectionMode::Auto) {
    return realistic_truncation(strategy_config(config, strategy), ClickPattern{1, 1, 0},
                                correction);
}

} // namespace qsd
