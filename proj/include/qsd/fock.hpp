#pragma once

// Truncated multimode Fock space: flat indexing, pure states, density
// operators, tensor products and partial traces over dense matrices.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qsd/errors.hpp"
#include "qsd/numerics.hpp"

namespace qsd {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Number of retained Fock levels per mode; levels run 0 .. n_max-1.
struct CutoffDim {
    int n_max = 16;

    explicit CutoffDim(int levels = 16) : n_max(levels) {
        if (n_max < 2) throw ConfigError("CutoffDim: need at least two Fock levels");
    }
    friend bool operator==(const CutoffDim&, const CutoffDim&) = default;
};

// Maps between flat indices and per-mode occupation numbers for a register
// of modes with a common cutoff.  Flattening is row-major with mode 0
// slowest, so appending a register tensors it on the right.
class BasisIndexer {
public:
    BasisIndexer(int mode_count, CutoffDim cutoff)
        : mode_count_(mode_count), cutoff_(cutoff) {
        if (mode_count < 1) throw ConfigError("BasisIndexer: need at least one mode");
        dim_ = 1;
        for (int m = 0; m < mode_count; ++m) {
            if (dim_ > (std::int64_t(1) << 40) / cutoff.n_max)
                throw ConfigError("BasisIndexer: basis dimension overflow");
            dim_ *= cutoff.n_max;
        }
    }

    int mode_count() const { return mode_count_; }
    CutoffDim cutoff() const { return cutoff_; }
    int n_max() const { return cutoff_.n_max; }
    std::int64_t dim() const { return dim_; }

    // Stride of a mode in the flat index.
    std::int64_t stride(int mode) const {
        check_mode(mode);
        std::int64_t s = 1;
        for (int m = mode_count_ - 1; m > mode; --m) s *= cutoff_.n_max;
        return s;
    }

    std::int64_t flat_index(const std::vector<int>& levels) const {
        if (int(levels.size()) != mode_count_)
            throw UsageError("flat_index: wrong number of occupation numbers");
        std::int64_t flat = 0;
        for (int m = 0; m < mode_count_; ++m) {
            if (levels[m] < 0 || levels[m] >= cutoff_.n_max)
                throw ConfigError("flat_index: occupation number outside cutoff");
            flat = flat * cutoff_.n_max + levels[m];
        }
        return flat;
    }

    std::vector<int> multi_index(std::int64_t flat) const {
        if (flat < 0 || flat >= dim_) throw UsageError("multi_index: flat index out of range");
        std::vector<int> levels(mode_count_);
        for (int m = mode_count_ - 1; m >= 0; --m) {
            levels[m] = int(flat % cutoff_.n_max);
            flat /= cutoff_.n_max;
        }
        return levels;
    }

    // Occupation number of one mode, without materialising the full tuple.
    int level_at(std::int64_t flat, int mode) const {
        return int((flat / stride(mode)) % cutoff_.n_max);
    }

    friend bool operator==(const BasisIndexer&, const BasisIndexer&) = default;

private:
    void check_mode(int mode) const {
        if (mode < 0 || mode >= mode_count_) throw UsageError("mode index out of range");
    }

    int mode_count_;
    CutoffDim cutoff_;
    std::int64_t dim_;
};

struct PureState {
    BasisIndexer indexer;
    Vector amplitudes;

    PureState(BasisIndexer idx, Vector amps)
        : indexer(idx), amplitudes(std::move(amps)) {
        if (amplitudes.size() != indexer.dim())
            throw ConfigError("PureState: amplitude vector does not match basis size");
    }

    double norm() const { return amplitudes.norm(); }

    PureState& normalize() {
        double n = norm();
        if (n < 1e-150) throw DegenerateError("PureState: cannot normalize a zero vector");
        amplitudes /= n;
        return *this;
    }
};

struct DensityOperator {
    BasisIndexer indexer;
    Matrix matrix;

    DensityOperator(BasisIndexer idx, Matrix m)
        : indexer(idx), matrix(std::move(m)) {
        if (matrix.rows() != indexer.dim() || matrix.cols() != indexer.dim())
            throw ConfigError("DensityOperator: matrix does not match basis size");
    }

    double trace() const { return matrix.trace().real(); }

    DensityOperator& normalize() {
        double t = trace();
        if (t < 1e-300) throw DegenerateError("DensityOperator: cannot normalize, trace is zero");
        matrix /= t;
        return *this;
    }

    double hermiticity_error() const {
        return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
        return solver.eigenvalues().minCoeff();
    }
};

inline PureState basis_state(const BasisIndexer& indexer, const std::vector<int>& levels) {
    Vector amps = Vector::Zero(indexer.dim());
    amps[indexer.flat_index(levels)] = 1.0;
    return PureState(indexer, std::move(amps));
}

inline PureState vacuum_state(int mode_count, CutoffDim cutoff) {
    BasisIndexer indexer(mode_count, cutoff);
    return basis_state(indexer, std::vector<int>(mode_count, 0));
}

inline DensityOperator projector(const PureState& psi) {
    return DensityOperator(psi.indexer, psi.amplitudes * psi.amplitudes.adjoint());
}

// Kronecker product; the result holds a's modes followed by b's modes.
inline DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    if (a.indexer.cutoff() != b.indexer.cutoff())
        throw ConfigError("tensor_product: operands have different cutoffs");
    BasisIndexer out_indexer(a.indexer.mode_count() + b.indexer.mode_count(), a.indexer.cutoff());
    const std::int64_t da = a.indexer.dim(), db = b.indexer.dim();
    Matrix out(da * db, da * db);
    for (std::int64_t i = 0; i < da; ++i)
        for (std::int64_t j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.matrix(i, j) * b.matrix;
    return DensityOperator(out_indexer, std::move(out));
}

inline PureState tensor_product(const PureState& a, const PureState& b) {
    if (a.indexer.cutoff() != b.indexer.cutoff())
        throw ConfigError("tensor_product: operands have different cutoffs");
    BasisIndexer out_indexer(a.indexer.mode_count() + b.indexer.mode_count(), a.indexer.cutoff());
    const std::int64_t da = a.indexer.dim(), db = b.indexer.dim();
    Vector out(da * db);
    for (std::int64_t i = 0; i < da; ++i) out.segment(i * db, db) = a.amplitudes[i] * b.amplitudes;
    return PureState(out_indexer, std::move(out));
}

// Reduced operator on the listed modes (ascending, duplicate-free), tracing
// out everything else.  Trace is preserved.
inline DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
    const int modes = rho.indexer.mode_count();
    if (keep.empty()) throw UsageError("partial_trace: keep list must name at least one mode");
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= modes) throw UsageError("partial_trace: mode index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw UsageError("partial_trace: keep list must be strictly ascending");
    }

    std::vector<int> traced;
    for (int m = 0; m < modes; ++m)
        if (!std::binary_search(keep.begin(), keep.end(), m)) traced.push_back(m);

    BasisIndexer out_indexer(int(keep.size()), rho.indexer.cutoff());
    if (traced.empty()) return DensityOperator(out_indexer, rho.matrix);

    BasisIndexer traced_indexer(int(traced.size()), rho.indexer.cutoff());
    const std::int64_t dk = out_indexer.dim(), dt = traced_indexer.dim();

    // Embed (kept levels, traced levels) into a flat index of the source.
    auto embed = [&](std::int64_t kf, std::int64_t tf) {
        std::int64_t flat = 0;
        auto kl = out_indexer.multi_index(kf);
        auto tl = traced_indexer.multi_index(tf);
        size_t ki = 0, ti = 0;
        for (int m = 0; m < modes; ++m) {
            int level = (ki < keep.size() && keep[ki] == m) ? kl[ki++] : tl[ti++];
            flat = flat * rho.indexer.n_max() + level;
        }
        return flat;
    };

    Matrix out = Matrix::Zero(dk, dk);
    for (std::int64_t t = 0; t < dt; ++t) {
        for (std::int64_t i = 0; i < dk; ++i) {
            const std::int64_t row = embed(i, t);
            for (std::int64_t j = 0; j < dk; ++j) out(i, j) += rho.matrix(row, embed(j, t));
        }
    }
    return DensityOperator(out_indexer, std::move(out));
}

// <psi| rho |psi>, clamped to [0, 1] against roundoff.
inline double fidelity_to_pure(const DensityOperator& rho, const PureState& psi) {
    if (!(rho.indexer == psi.indexer))
        throw ConfigError("fidelity_to_pure: operands live on different bases");
    double f = (psi.amplitudes.adjoint() * rho.matrix * psi.amplitudes)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
}

} // namespace qsd
