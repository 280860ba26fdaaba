#pragma once

// State evaluation: closed-form fidelity baselines for states that skip
// the truncation device entirely, the Wigner function on a quadrature
// grid with marginals, cross sections and negativity measures, and the
// phase distribution obtained by radially integrating the Wigner
// function.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "qsd/fock.hpp"
#include "qsd/numerics.hpp"
#include "qsd/optics.hpp"

namespace qsd {

// Overlap of the dephased (Fock-diagonal) input with the target
// superposition: (1 + |alpha|^4) / (1 + |alpha|^2)^2.
inline double fidelity_dephased(Complex alpha) {
    const double a_sq = std::norm(alpha);
    return (1.0 + a_sq * a_sq) / ((1.0 + a_sq) * (1.0 + a_sq));
}

// Overlap of the coherent state |beta> with the target superposition
// built from alpha.  delta adds an extra relative phase to beta.
inline double fidelity_coherent_baseline(Complex alpha, Complex beta, double delta = 0.0) {
    const double ab = std::abs(alpha) * std::abs(beta);
    const double rel = std::arg(alpha) - std::arg(beta) - delta;
    return std::exp(-std::norm(beta)) * (1.0 + 2.0 * ab * std::cos(rel) + ab * ab) /
           (1.0 + std::norm(alpha));
}

// Amplitude of the coherent state maximizing the baseline overlap:
// |beta|^2 = (1 + 2|alpha|^2 - sqrt(1 + 4|alpha|^2)) / (2|alpha|^2),
// evaluated in the cancellation-free form 2A / (1 + 2A + sqrt(1 + 4A)),
// in phase with alpha.  Continuous at alpha = 0.
inline Complex optimal_beta(Complex alpha) {
    const double a_sq = std::norm(alpha);
    const double b_sq = 2.0 * a_sq / (1.0 + 2.0 * a_sq + std::sqrt(1.0 + 4.0 * a_sq));
    return std::polar(std::sqrt(b_sq), std::arg(alpha));
}

// Baseline overlap when the input is simply attenuated in intensity by xi.
inline double fidelity_attenuated(Complex alpha, double xi) {
    return fidelity_coherent_baseline(alpha, attenuate(alpha, xi));
}

inline double fidelity_attenuated_optimal(Complex alpha) {
    return fidelity_coherent_baseline(alpha, optimal_beta(alpha));
}

// Rectangular quadrature-space grid; index i runs over X, j over P.
struct PhaseSpaceGrid {
    double x_min = -4.0;
    double x_max = 4.0;
    double p_min = -4.0;
    double p_max = 4.0;
    int nx = 201;
    int np = 201;

    void validate() const {
        if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(p_min) &&
              std::isfinite(p_max)))
            throw ConfigError("PhaseSpaceGrid: bounds must be finite");
        if (x_min >= x_max || p_min >= p_max)
            throw ConfigError("PhaseSpaceGrid: bounds must satisfy min < max");
        if (nx < 2 || np < 2) throw ConfigError("PhaseSpaceGrid: need at least 2x2 points");
    }

    double x_at(int i) const { return x_min + (x_max - x_min) * double(i) / double(nx - 1); }
    double p_at(int j) const { return p_min + (p_max - p_min) * double(j) / double(np - 1); }
    double x_step() const { return (x_max - x_min) / double(nx - 1); }
    double p_step() const { return (p_max - p_min) / double(np - 1); }
};

// W(X, P) of a single-mode state: (1/pi) sum_{m,n} rho_mn <n|T(X,P)|m>
// with, for m >= n,
//   <n|T|m> = (-1)^n 2^{m-n+1} (X - iP)^{m-n} sqrt(n!/m!)
//             e^{-2r^2} L_n^{m-n}(4 r^2),   r^2 = X^2 + P^2,
// and the m < n half fixed by Hermitian symmetry.  The imaginary residue
// of the sum is checked before being discarded.
inline double wigner_point(const DensityOperator& rho, double x, double p) {
    if (rho.indexer.mode_count() != 1)
        throw UsageError("wigner_point: state must be single-mode");
    const int n_max = rho.indexer.n_max();
    const double r_sq = x * x + p * p;
    const Complex z(x, -p);
    Complex sum = 0.0;
    Complex z_pow = 1.0;
    double two_pow = 2.0;
    for (int d = 0; d < n_max; ++d) {
        for (int n = 0; n + d < n_max; ++n) {
            const int m = n + d;
            const double sign = n % 2 == 0 ? 1.0 : -1.0;
            const Complex t = sign * two_pow * z_pow * sqrt_factorial_ratio(n, m) *
                              laguerre_assoc(n, d, 4.0 * r_sq);
            sum += rho.matrix(m, n) * t;
            if (d > 0) sum += rho.matrix(n, m) * std::conj(t);
        }
        z_pow *= z;
        two_pow *= 2.0;
    }
    sum *= std::exp(-2.0 * r_sq) / M_PI;
    if (std::abs(sum.imag()) > 1e-10 * std::max(1.0, std::abs(sum.real())))
        throw ConfigError("wigner_point: density matrix is not Hermitian");
    return sum.real();
}

// Field over the grid; entry (i, j) is W(x_at(i), p_at(j)).
inline Eigen::MatrixXd wigner(const DensityOperator& rho, const PhaseSpaceGrid& grid) {
    grid.validate();
    Eigen::MatrixXd field(grid.nx, grid.np);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.np; ++j)
            field(i, j) = wigner_point(rho, grid.x_at(i), grid.p_at(j));
    return field;
}

namespace detail {

inline double trapezoid_weight(int index, int count, double step) {
    return (index == 0 || index == count - 1) ? 0.5 * step : step;
}

} // namespace detail

// Trapezoid integral of a field sampled on the grid.
inline double wigner_integral(const Eigen::MatrixXd& field, const PhaseSpaceGrid& grid) {
    grid.validate();
    if (field.rows() != grid.nx || field.cols() != grid.np)
        throw UsageError("wigner_integral: field does not match the grid");
    double total = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        const double wx = detail::trapezoid_weight(i, grid.nx, grid.x_step());
        for (int j = 0; j < grid.np; ++j)
            total += wx * detail::trapezoid_weight(j, grid.np, grid.p_step()) * field(i, j);
    }
    return total;
}

// Smallest grid value together with the magnitude of the integral of the
// negative part (0 when the field is nonnegative).
struct WignerNegativity {
    double min_value = 0.0;
    double negative_mass = 0.0;
};

inline WignerNegativity wigner_negativity(const Eigen::MatrixXd& field,
                                          const PhaseSpaceGrid& grid) {
    grid.validate();
    if (field.rows() != grid.nx || field.cols() != grid.np)
        throw UsageError("wigner_negativity: field does not match the grid");
    WignerNegativity result;
    result.min_value = field.minCoeff();
    for (int i = 0; i < grid.nx; ++i) {
        const double wx = detail::trapezoid_weight(i, grid.nx, grid.x_step());
        for (int j = 0; j < grid.np; ++j)
            if (field(i, j) < 0.0)
                result.negative_mass -=
                    wx * detail::trapezoid_weight(j, grid.np, grid.p_step()) * field(i, j);
    }
    return result;
}

enum class MarginalAxis {
    XAtP0,      // cross section W(X, P = 0) over the grid's X points
    PAtX0,      // cross section W(X = 0, P) over the grid's P points
    IntegrateP, // quadrature distribution of X: integral of W over P
    IntegrateX  // quadrature distribution of P: integral of W over X
};

inline const char* to_string(MarginalAxis axis) {
    switch (axis) {
        case MarginalAxis::XAtP0: return "x_at_p0";
        case MarginalAxis::PAtX0: return "p_at_x0";
        case MarginalAxis::IntegrateP: return "integrate_p";
        case MarginalAxis::IntegrateX: return "integrate_x";
    }
    return "?";
}

struct MarginalCurve {
    std::vector<double> coordinate;
    std::vector<double> value;
};

inline MarginalCurve wigner_marginals(const DensityOperator& rho, MarginalAxis axis,
                                      const PhaseSpaceGrid& grid) {
    grid.validate();
    MarginalCurve curve;
    const bool over_x = axis == MarginalAxis::XAtP0 || axis == MarginalAxis::IntegrateP;
    const int count = over_x ? grid.nx : grid.np;
    curve.coordinate.resize(count);
    curve.value.resize(count);
    for (int i = 0; i < count; ++i) {
        const double c = over_x ? grid.x_at(i) : grid.p_at(i);
        curve.coordinate[i] = c;
        switch (axis) {
            case MarginalAxis::XAtP0: curve.value[i] = wigner_point(rho, c, 0.0); break;
            case MarginalAxis::PAtX0: curve.value[i] = wigner_point(rho, 0.0, c); break;
            case MarginalAxis::IntegrateP: {
                double total = 0.0;
                for (int j = 0; j < grid.np; ++j)
                    total += detail::trapezoid_weight(j, grid.np, grid.p_step()) *
                             wigner_point(rho, c, grid.p_at(j));
                curve.value[i] = total;
                break;
            }
            case MarginalAxis::IntegrateX: {
                double total = 0.0;
                for (int j = 0; j < grid.nx; ++j)
                    total += detail::trapezoid_weight(j, grid.nx, grid.x_step()) *
                             wigner_point(rho, grid.x_at(j), c);
                curve.value[i] = total;
                break;
            }
        }
    }
    return curve;
}

// Radial x angular quadrature for the phase distribution.  The radial
// rule covers [0, r_max]; beyond r_max the integrand is bounded by a
// Gaussian envelope fixed by the cutoff.
struct QuadratureRule {
    std::vector<double> radial_nodes;
    std::vector<double> radial_weights;
    int n_theta = 360;

    static QuadratureRule radial(double r_max, int n_radial = 200, int n_theta = 360) {
        if (!(r_max > 0.0)) throw ConfigError("QuadratureRule: r_max must be > 0");
        if (n_radial < 2) throw ConfigError("QuadratureRule: need at least 2 radial nodes");
        if (n_theta < 4) throw ConfigError("QuadratureRule: need at least 4 angles");
        auto [nodes, weights] = gauss_legendre(n_radial, 0.0, r_max);
        QuadratureRule rule;
        rule.radial_nodes = std::move(nodes);
        rule.radial_weights = std::move(weights);
        rule.n_theta = n_theta;
        return rule;
    }

    // r_max = sqrt(n_max / 2) + 4: past the classically allowed radius of
    // the highest retained Fock level, W is Gaussian-suppressed.
    static QuadratureRule for_cutoff(CutoffDim cutoff, int n_radial = 200, int n_theta = 360) {
        return radial(std::sqrt(cutoff.n_max / 2.0) + 4.0, n_radial, n_theta);
    }
};

struct PhaseDistribution {
    std::vector<double> theta;
    std::vector<double> value;
};

// P(theta) = integral of W along the ray at angle theta, weighted by the
// radius; integrates to 1 over [0, 2pi) for a normalized state.
inline PhaseDistribution wigner_phase_distribution(const DensityOperator& rho,
                                                   const QuadratureRule& rule) {
    if (rule.radial_nodes.size() != rule.radial_weights.size() || rule.radial_nodes.empty())
        throw ConfigError("wigner_phase_distribution: malformed quadrature rule");
    PhaseDistribution dist;
    dist.theta.resize(rule.n_theta);
    dist.value.resize(rule.n_theta);
    for (int k = 0; k < rule.n_theta; ++k) {
        const double theta = 2.0 * M_PI * double(k) / double(rule.n_theta);
        double total = 0.0;
        for (size_t i = 0; i < rule.radial_nodes.size(); ++i) {
            const double r = rule.radial_nodes[i];
            total += rule.radial_weights[i] * r *
                     wigner_point(rho, r * std::cos(theta), r * std::sin(theta));
        }
        dist.theta[k] = theta;
        dist.value[k] = total;
    }
    return dist;
}

} // namespace qsd
