#pragma once

// Passive linear optics on the truncated Fock space: coherent states,
// two-mode beam splitters, and the down-conversion photon-pair source.

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "qsd/fock.hpp"

namespace qsd {

// Default bound on the coherent-state probability mass allowed to fall
// beyond the cutoff.  Chosen so the stock cutoff of 16 levels covers mean
// photon numbers up to 4 (tail mass 4.9e-6 there); tighten per call if a
// stricter truncation is required.
inline constexpr double kCoherentTailTol = 1e-5;

// Poisson mass of |alpha|^2 at or above n_max-1 photons... smallest cutoff
// whose tail mass is below tol.
inline int required_cutoff_for_coherent(Complex alpha, double tol) {
    const double mean = std::norm(alpha);
    double pmf = std::exp(-mean);
    double cdf = pmf;
    int n = 0;
    while (1.0 - cdf > tol && n < 4096) {
        ++n;
        pmf *= mean / double(n);
        cdf += pmf;
    }
    return n + 1; // levels 0..n are retained
}

// Coherent state |alpha>, renormalized within the cutoff.  Amplitudes are
// e^{-|alpha|^2/2} alpha^n / sqrt(n!).
inline PureState coherent_state(Complex alpha, CutoffDim cutoff,
                                double tail_tol = kCoherentTailTol) {
    const int needed = required_cutoff_for_coherent(alpha, tail_tol);
    if (needed > cutoff.n_max)
        throw CutoffError("coherent_state: |alpha|^2 = " + std::to_string(std::norm(alpha)) +
                              " needs n_max >= " + std::to_string(needed) +
                              " for tail mass below " + std::to_string(tail_tol),
                          needed);
    BasisIndexer indexer(1, cutoff);
    Vector amps(cutoff.n_max);
    Complex c = std::exp(-0.5 * std::norm(alpha));
    for (int n = 0; n < cutoff.n_max; ++n) {
        amps[n] = c;
        c *= alpha / std::sqrt(double(n + 1));
    }
    PureState state(indexer, std::move(amps));
    state.normalize();
    return state;
}

// Lossless beam splitter amplitudes (|t|^2 + |r|^2 = 1).  The first input
// transmits into the first output with amplitude t:
//   a1+  ->  t b1+ - conj(r) b2+
//   a2+  ->  r b1+ + conj(t) b2+
// The preset convention used throughout takes t real and r purely
// imaginary.
struct BeamSplitterParams {
    Complex t;
    Complex r;

    BeamSplitterParams(Complex t_amp, Complex r_amp) : t(t_amp), r(r_amp) {
        if (std::abs(std::norm(t) + std::norm(r) - 1.0) > 1e-10)
            throw ConfigError("BeamSplitterParams: |t|^2 + |r|^2 must be 1");
    }

    static BeamSplitterParams from_transmittance(double t_sq) {
        if (t_sq < 0.0 || t_sq > 1.0)
            throw ConfigError("BeamSplitterParams: transmittance must lie in [0, 1]");
        return BeamSplitterParams(std::sqrt(t_sq), Complex(0.0, std::sqrt(1.0 - t_sq)));
    }

    static BeamSplitterParams fifty_fifty() { return from_transmittance(0.5); }

    // Parameters of the inverse splitter: (t, r) -> (conj(t), -r).
    BeamSplitterParams inverse() const { return BeamSplitterParams(std::conj(t), -r); }
};

// Matrix elements <j,k| R |m,n> of the two-mode splitter unitary on the
// truncated basis, from the multinomial expansion of
// (t b1+ - conj(r) b2+)^m (r b1+ + conj(t) b2+)^n acting on vacuum.
// Exact (unitary) on every block of fixed total photon number that fits
// within the cutoff; blocks spilling past the cutoff lose the amplitude
// that would scatter above it.
inline Matrix beam_splitter_unitary(const BeamSplitterParams& bs, CutoffDim cutoff) {
    const int n_max = cutoff.n_max;
    Matrix u = Matrix::Zero(std::int64_t(n_max) * n_max, std::int64_t(n_max) * n_max);
    for (int m = 0; m < n_max; ++m) {
        for (int n = 0; n < n_max; ++n) {
            const int total = m + n;
            for (int j = std::max(0, total - (n_max - 1)); j <= std::min(total, n_max - 1); ++j) {
                const int k = total - j;
                // Collect photon routings with exactly j quanta in output 1.
                Complex amp = 0.0;
                for (int p = std::max(0, j - n); p <= std::min(j, m); ++p) {
                    const int q = j - p;
                    amp += binomial(m, p) * binomial(n, q) * ipow(bs.t, p) *
                           ipow(-std::conj(bs.r), m - p) * ipow(bs.r, q) *
                           ipow(std::conj(bs.t), n - q);
                }
                amp *= sqrt_factorial_ratio(j, m) * sqrt_factorial_ratio(k, n);
                u(std::int64_t(j) * n_max + k, std::int64_t(m) * n_max + n) = amp;
            }
        }
    }
    return u;
}

namespace detail {

// Apply a two-mode unitary in place to the (mode_first, mode_second) slots
// of a flat state vector, iterating over all spectator configurations.
inline void apply_two_mode(Vector& amps, const BasisIndexer& indexer, int mode_first,
                           int mode_second, const Matrix& u) {
    const int n_max = indexer.n_max();
    const std::int64_t sa = indexer.stride(mode_first);
    const std::int64_t sb = indexer.stride(mode_second);
    Vector in(std::int64_t(n_max) * n_max), out(std::int64_t(n_max) * n_max);
    for (std::int64_t base = 0; base < indexer.dim(); ++base) {
        if (indexer.level_at(base, mode_first) != 0 || indexer.level_at(base, mode_second) != 0)
            continue;
        for (int a = 0; a < n_max; ++a)
            for (int b = 0; b < n_max; ++b)
                in[std::int64_t(a) * n_max + b] = amps[base + a * sa + b * sb];
        out.noalias() = u * in;
        for (int a = 0; a < n_max; ++a)
            for (int b = 0; b < n_max; ++b)
                amps[base + a * sa + b * sb] = out[std::int64_t(a) * n_max + b];
    }
}

inline void check_mode_pair(const BasisIndexer& indexer, int mode_first, int mode_second) {
    if (mode_first < 0 || mode_first >= indexer.mode_count() || mode_second < 0 ||
        mode_second >= indexer.mode_count())
        throw UsageError("apply_beam_splitter: mode index out of range");
    if (mode_first == mode_second)
        throw UsageError("apply_beam_splitter: the two modes must be distinct");
}

} // namespace detail

inline PureState apply_beam_splitter(const PureState& psi, int mode_first, int mode_second,
                                     const BeamSplitterParams& bs) {
    detail::check_mode_pair(psi.indexer, mode_first, mode_second);
    const Matrix u = beam_splitter_unitary(bs, psi.indexer.cutoff());
    PureState out = psi;
    detail::apply_two_mode(out.amplitudes, out.indexer, mode_first, mode_second, u);
    return out;
}

inline DensityOperator apply_beam_splitter(const DensityOperator& rho, int mode_first,
                                           int mode_second, const BeamSplitterParams& bs) {
    detail::check_mode_pair(rho.indexer, mode_first, mode_second);
    const Matrix u = beam_splitter_unitary(bs, rho.indexer.cutoff());
    const Matrix uc = u.conjugate();
    DensityOperator out = rho;
    // U rho U+ column by column: first U rho, then the right factor via
    // the conjugate unitary acting on each transposed row.
    Vector col(out.indexer.dim());
    for (std::int64_t j = 0; j < out.indexer.dim(); ++j) {
        col = out.matrix.col(j);
        detail::apply_two_mode(col, out.indexer, mode_first, mode_second, u);
        out.matrix.col(j) = col;
    }
    for (std::int64_t i = 0; i < out.indexer.dim(); ++i) {
        col = out.matrix.row(i).transpose();
        detail::apply_two_mode(col, out.indexer, mode_first, mode_second, uc);
        out.matrix.row(i) = col.transpose();
    }
    return out;
}

// Parametric down-conversion pair source.  gamma = tanh of the squeeze
// parameter; gamma^2 is the pair emission probability per pulse.
struct SpdcParams {
    double gamma = std::sqrt(5e-4);
    double pump_phase = 0.0;
    int pair_cutoff = 3;

    SpdcParams() = default;
    SpdcParams(double g, double phase, int pairs)
        : gamma(g), pump_phase(phase), pair_cutoff(pairs) {
        if (gamma < 0.0 || gamma >= 1.0) throw ConfigError("SpdcParams: gamma must lie in [0, 1)");
        if (pair_cutoff < 1) throw ConfigError("SpdcParams: pair_cutoff must be at least 1");
    }

    static SpdcParams from_pair_probability(double gamma_sq, double phase = 0.0, int pairs = 3) {
        if (gamma_sq < 0.0 || gamma_sq >= 1.0)
            throw ConfigError("SpdcParams: pair probability must lie in [0, 1)");
        return SpdcParams(std::sqrt(gamma_sq), phase, pairs);
    }

    // Probability mass discarded above pair_cutoff pairs.
    double pair_tail() const { return ipow(gamma * gamma, pair_cutoff + 1); }
};

inline void check_pair_cutoff(const SpdcParams& source, CutoffDim cutoff) {
    if (source.pair_cutoff >= cutoff.n_max)
        throw ConfigError("spdc: pair_cutoff must be below the Fock cutoff");
}

// Pair-number weights of the phase-averaged source, normalized over
// 0..pair_cutoff pairs: w_k proportional to gamma^(2k).
inline std::vector<double> spdc_pair_weights(const SpdcParams& source, CutoffDim cutoff) {
    check_pair_cutoff(source, cutoff);
    std::vector<double> w(source.pair_cutoff + 1);
    double sum = 0.0;
    for (int k = 0; k <= source.pair_cutoff; ++k) {
        w[k] = ipow(source.gamma * source.gamma, k);
        sum += w[k];
    }
    for (double& x : w) x /= sum;
    return w;
}

// Two-mode squeezed vacuum truncated at pair_cutoff photon pairs,
// renormalized: amplitudes proportional to (gamma e^{i pump_phase})^k on
// |k, k>.
inline PureState spdc_pure(const SpdcParams& source, CutoffDim cutoff) {
    check_pair_cutoff(source, cutoff);
    BasisIndexer indexer(2, cutoff);
    Vector amps = Vector::Zero(indexer.dim());
    const Complex g = source.gamma * std::exp(Complex(0.0, source.pump_phase));
    for (int k = 0; k <= source.pair_cutoff; ++k)
        amps[indexer.flat_index({k, k})] = ipow(g, k);
    PureState state(indexer, std::move(amps));
    state.normalize();
    return state;
}

// Pump-phase-averaged source: the diagonal mixture of |k, k><k, k| with
// weights spdc_pair_weights.
inline DensityOperator spdc_mixed(const SpdcParams& source, CutoffDim cutoff) {
    BasisIndexer indexer(2, cutoff);
    Matrix m = Matrix::Zero(indexer.dim(), indexer.dim());
    const std::vector<double> w = spdc_pair_weights(source, cutoff);
    for (int k = 0; k <= source.pair_cutoff; ++k) {
        const std::int64_t i = indexer.flat_index({k, k});
        m(i, i) = w[k];
    }
    return DensityOperator(indexer, std::move(m));
}

// Amplitude after intensity attenuation by xi: alpha -> sqrt(xi) alpha.
inline Complex attenuate(Complex alpha, double xi) {
    if (xi < 0.0 || xi > 1.0) throw ConfigError("attenuate: xi must lie in [0, 1]");
    return std::sqrt(xi) * alpha;
}

} // namespace qsd
