#pragma once

// Photon counting models.  Every detector here is diagonal in the Fock
// basis: finite efficiency thins the incident photons binomially and dark
// counts add an independent Poisson background accumulated over the
// resolving time.  Three readout granularities are provided:
//
//   Cpc   click / no-click (conventional photon counter)
//   Spc   0 / 1 / (2 or more)  (single-photon-resolving counter)
//   Pndc  full photon-number resolution

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qsd/fock.hpp"

namespace qsd {

enum class DetectorKind { Cpc, Spc, Pndc };

inline const char* to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Cpc: return "cpc";
        case DetectorKind::Spc: return "spc";
        case DetectorKind::Pndc: return "pndc";
    }
    return "?";
}

struct DetectorModel {
    DetectorKind kind = DetectorKind::Cpc;
    double eta = 1.0;      // quantum efficiency
    double r_dark = 0.0;   // dark count rate, 1/s
    double tau_res = 1e-8; // resolving time, s

    // Mean dark counts per detection window.
    double nu() const { return r_dark * tau_res; }

    static DetectorModel make(DetectorKind kind, double eta, double r_dark,
                              double tau_res = 1e-8) {
        if (eta < 0.0 || eta > 1.0)
            throw ConfigError("DetectorModel: efficiency must lie in [0, 1]");
        if (r_dark < 0.0) throw ConfigError("DetectorModel: dark count rate must be >= 0");
        if (tau_res <= 0.0) throw ConfigError("DetectorModel: resolving time must be > 0");
        return DetectorModel{kind, eta, r_dark, tau_res};
    }

    static DetectorModel cpc(double eta = 0.7, double r_dark = 100.0, double tau_res = 1e-8) {
        return make(DetectorKind::Cpc, eta, r_dark, tau_res);
    }
    static DetectorModel spc(double eta = 0.7, double r_dark = 1e4, double tau_res = 1e-8) {
        return make(DetectorKind::Spc, eta, r_dark, tau_res);
    }
    static DetectorModel pndc(double eta = 0.7, double r_dark = 100.0, double tau_res = 1e-8) {
        return make(DetectorKind::Pndc, eta, r_dark, tau_res);
    }

    // Perfect counter of the same readout granularity.
    DetectorModel idealized() const { return DetectorModel{kind, 1.0, 0.0, tau_res}; }
};

// One diagonal POVM element: entry m is the probability of this outcome
// given m photons in the detected mode.
struct PovmElement {
    Eigen::VectorXd diagonal;
    int outcome = 0;
};

namespace detail {

// P(N registered | m incident) for a number-resolving counter: n of the m
// photons survive thinning by eta and N - n dark counts fire.
inline double pndc_prob(int count, int m, double eta, double nu) {
    double total = 0.0;
    const double exp_nu = std::exp(-nu);
    for (int n = 0; n <= std::min(count, m); ++n) {
        double dark = exp_nu;
        for (int i = 1; i <= count - n; ++i) dark *= nu / double(i);
        total += dark * binomial(m, n) * ipow(eta, n) * ipow(1.0 - eta, m - n);
    }
    return total;
}

// Probability of registering nothing: no survivor and no dark count.
inline double prob_silent(int m, double eta, double nu) {
    return std::exp(-nu) * ipow(1.0 - eta, m);
}

// Probability of registering exactly one photon equivalent: one dark count
// and no survivor, or one survivor and no dark count.
inline double prob_single(int m, double eta, double nu) {
    double p = nu * ipow(1.0 - eta, m);
    if (m >= 1) p += eta * double(m) * ipow(1.0 - eta, m - 1);
    return std::exp(-nu) * p;
}

inline void check_entries(Eigen::VectorXd& diag, const char* what) {
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (diag[i] < -1e-12 || diag[i] > 1.0 + 1e-12)
            throw ConfigError(std::string(what) + ": POVM entry outside [0, 1]");
        diag[i] = std::min(1.0, std::max(0.0, diag[i]));
    }
}

} // namespace detail

// Click / no-click elements.  Outcome 0 = silent, 1 = click.
inline PovmElement povm_cpc(const DetectorModel& det, int outcome, CutoffDim cutoff) {
    if (outcome < 0 || outcome > 1)
        throw UsageError("povm_cpc: outcome must be 0 (silent) or 1 (click)");
    Eigen::VectorXd diag(cutoff.n_max);
    for (int m = 0; m < cutoff.n_max; ++m) {
        const double silent = detail::prob_silent(m, det.eta, det.nu());
        diag[m] = outcome == 0 ? silent : 1.0 - silent;
    }
    detail::check_entries(diag, "povm_cpc");
    return PovmElement{std::move(diag), outcome};
}

// Single-photon-resolving elements.  Outcome 0 = silent, 1 = exactly one,
// 2 = two or more.
inline PovmElement povm_spc(const DetectorModel& det, int outcome, CutoffDim cutoff) {
    if (outcome < 0 || outcome > 2)
        throw UsageError("povm_spc: outcome must be 0, 1, or 2 (= two or more)");
    Eigen::VectorXd diag(cutoff.n_max);
    for (int m = 0; m < cutoff.n_max; ++m) {
        const double silent = detail::prob_silent(m, det.eta, det.nu());
        const double single = detail::prob_single(m, det.eta, det.nu());
        diag[m] = outcome == 0 ? silent : outcome == 1 ? single : 1.0 - silent - single;
    }
    detail::check_entries(diag, "povm_spc");
    return PovmElement{std::move(diag), outcome};
}

// Number-resolving element for an exact registered count.
inline PovmElement povm_pndc(const DetectorModel& det, int outcome, CutoffDim cutoff) {
    if (outcome < 0) throw UsageError("povm_pndc: outcome must be >= 0");
    Eigen::VectorXd diag(cutoff.n_max);
    for (int m = 0; m < cutoff.n_max; ++m)
        diag[m] = detail::pndc_prob(outcome, m, det.eta, det.nu());
    detail::check_entries(diag, "povm_pndc");
    return PovmElement{std::move(diag), outcome};
}

// Element for one outcome label under the detector's own readout
// granularity.  Labels follow the counting convention of the kind: exact
// counts for Pndc, 0/1 for Cpc (1 = click), 0/1/2 for Spc (2 = two or
// more).
inline PovmElement povm_element(const DetectorModel& det, int outcome, CutoffDim cutoff) {
    switch (det.kind) {
        case DetectorKind::Cpc: return povm_cpc(det, outcome, cutoff);
        case DetectorKind::Spc: return povm_spc(det, outcome, cutoff);
        case DetectorKind::Pndc: return povm_pndc(det, outcome, cutoff);
    }
    throw UsageError("povm_element: unknown detector kind");
}

// All outcomes of the detector.  For Cpc and Spc the set is exactly
// complete; for Pndc enough counts are included that the completeness
// defect on the truncated space stays below 1e-12.
inline std::vector<PovmElement> povm_complete_set(const DetectorModel& det, CutoffDim cutoff) {
    std::vector<PovmElement> set;
    switch (det.kind) {
        case DetectorKind::Cpc:
            for (int o = 0; o <= 1; ++o) set.push_back(povm_cpc(det, o, cutoff));
            break;
        case DetectorKind::Spc:
            for (int o = 0; o <= 2; ++o) set.push_back(povm_spc(det, o, cutoff));
            break;
        case DetectorKind::Pndc: {
            const int top = cutoff.n_max + int(std::ceil(10.0 * det.nu())) + 10;
            for (int o = 0; o <= top; ++o) set.push_back(povm_pndc(det, o, cutoff));
            break;
        }
    }
    return set;
}

// Measurement update for a diagonal element acting on one mode of a
// multimode density operator: returns sqrt(P) rho sqrt(P) (unnormalized)
// and its trace, the outcome probability.
struct PovmUpdate {
    DensityOperator unnormalized;
    double probability = 0.0;
};

inline PovmUpdate apply_diagonal_povm(const DensityOperator& rho, int mode,
                                      const PovmElement& element) {
    if (mode < 0 || mode >= rho.indexer.mode_count())
        throw UsageError("apply_diagonal_povm: mode index out of range");
    if (element.diagonal.size() != rho.indexer.n_max())
        throw ConfigError("apply_diagonal_povm: element size does not match the cutoff");
    const std::int64_t dim = rho.indexer.dim();
    Eigen::VectorXd weight(dim);
    for (std::int64_t i = 0; i < dim; ++i)
        weight[i] = std::sqrt(element.diagonal[rho.indexer.level_at(i, mode)]);
    DensityOperator out = rho;
    out.matrix = weight.asDiagonal() * out.matrix * weight.asDiagonal();
    double prob = 0.0;
    for (std::int64_t i = 0; i < dim; ++i)
        prob += weight[i] * weight[i] * rho.matrix(i, i).real();
    return PovmUpdate{std::move(out), prob};
}

} // namespace qsd
