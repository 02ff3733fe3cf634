#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "clockscar/algebra.hpp"
#include "clockscar/models.hpp"
#include "clockscar/rng.hpp"

namespace clockscar {

// ---------------------------------------------------------------------------
// Dense Hermitian exact diagonalization, full space or one charge sector.
// Real-symmetric inputs (every n = 2, 3 model here) take the real solver
// path, which is several times faster at desk scale.
// ---------------------------------------------------------------------------

struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;  // ascending
    bool has_vectors = false;
    bool real_vectors = false;
    Eigen::MatrixXd vectors_real;
    Eigen::MatrixXcd vectors_complex;

    std::optional<double> sector_charge;
    std::vector<std::int64_t> sector_indices;  // empty for full space
    std::int64_t full_dimension = 0;

    std::optional<ModelSpec> provenance;
    std::uint64_t seed = 0;

    Eigen::Index size() const { return eigenvalues.size(); }

    double spectral_width() const {
        return size() > 0 ? eigenvalues(size() - 1) - eigenvalues(0) : 0.0;
    }

    /// Eigenvector embedded in the full Hilbert space.
    Eigen::VectorXcd eigenvector_full(Eigen::Index i) const {
        if (!has_vectors) throw std::runtime_error("EigenDecomposition: eigenvectors not retained");
        Eigen::VectorXcd col(size());
        if (real_vectors)
            col = vectors_real.col(i).cast<Complex>();
        else
            col = vectors_complex.col(i);
        if (sector_indices.empty()) return col;
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(full_dimension);
        for (Eigen::Index k = 0; k < col.size(); ++k) full(sector_indices[k]) = col(k);
        return full;
    }

    /// Amplitudes <v_i|state> for all eigenvectors; the state is given in the
    /// full Hilbert space and restricted to the sector when needed.
    Eigen::VectorXcd overlaps(const Eigen::VectorXcd& state) const {
        if (!has_vectors) throw std::runtime_error("EigenDecomposition: eigenvectors not retained");
        Eigen::VectorXcd s;
        if (sector_indices.empty()) {
            s = state;
        } else {
            s.resize(size());
            for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = state(sector_indices[k]);
        }
        if (real_vectors) {
            Eigen::VectorXd re = vectors_real.transpose() * s.real();
            Eigen::VectorXd im = vectors_real.transpose() * s.imag();
            Eigen::VectorXcd out(re.size());
            out.real() = re;
            out.imag() = im;
            return out;
        }
        return vectors_complex.adjoint() * s;
    }
};

struct DiagonalizeOptions {
    std::optional<double> sector;
    bool compute_vectors = true;
};

namespace detail {

/// |[Q, H]|_F / (|Q|_F |H|_F) with Q the diagonal charge; cheap because the
/// commutator only reweights existing entries by charge differences.
inline double charge_commutator_residual(const SparseMatrixC& h, const BasisIndex& basis) {
    double acc = 0.0, hnorm = 0.0, qnorm = 0.0;
    for (int k = 0; k < h.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(h, k); it; ++it) {
            const double dq =
                basis.digit_sum_charge(it.row()) - basis.digit_sum_charge(it.col());
            acc += dq * dq * std::norm(it.value());
            hnorm += std::norm(it.value());
        }
    }
    const std::int64_t dim = basis.dimension();
    for (std::int64_t i = 0; i < dim; ++i) {
        const double q = basis.digit_sum_charge(i);
        qnorm += q * q;
    }
    if (hnorm == 0.0 || qnorm == 0.0) return 0.0;
    return std::sqrt(acc) / std::sqrt(hnorm * qnorm);
}

inline bool matrix_is_real(const SparseMatrixC& m) {
    double mx = 0.0, mi = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(m, k); it; ++it) {
            mx = std::max(mx, std::abs(it.value()));
            mi = std::max(mi, std::abs(it.value().imag()));
        }
    }
    return mi <= 1e-13 * std::max(1.0, mx);
}

inline void assign_entry(double& dst, const Complex& v) { dst = v.real(); }
inline void assign_entry(Complex& dst, const Complex& v) { dst = v; }

}  // namespace detail

inline EigenDecomposition diagonalize(const SparseOperator& h, int n, int L,
                                      const DiagonalizeOptions& opts = {}) {
    BasisIndex basis(L, n);
    if (h.matrix.rows() != basis.dimension())
        throw std::invalid_argument("diagonalize: operator dimension mismatch");
    if (!is_hermitian(h.matrix, 1e-12))
        throw std::invalid_argument("diagonalize: operator is not Hermitian");

    EigenDecomposition out;
    out.full_dimension = basis.dimension();

    std::vector<std::int64_t> idx;
    if (opts.sector) {
        if (detail::charge_commutator_residual(h.matrix, basis) > 1e-10)
            throw std::invalid_argument(
                "diagonalize: sector requested but operator does not conserve the U(1) charge");
        idx = charge_sector_basis(L, n, *opts.sector);
        if (idx.empty()) throw std::invalid_argument("diagonalize: empty charge sector");
        out.sector_charge = *opts.sector;
        out.sector_indices = idx;
    }

    const bool real_path = detail::matrix_is_real(h.matrix);
    const auto dim = static_cast<Eigen::Index>(idx.empty() ? basis.dimension()
                                                           : static_cast<std::int64_t>(idx.size()));

    // Position of each full-space index inside the sector, -1 when outside.
    std::vector<std::int32_t> pos;
    if (!idx.empty()) {
        pos.assign(basis.dimension(), -1);
        for (std::size_t k = 0; k < idx.size(); ++k) pos[idx[k]] = static_cast<std::int32_t>(k);
    }

    auto fill_dense = [&](auto& dense) {
        dense.setZero();
        if (idx.empty()) {
            for (int k = 0; k < h.matrix.outerSize(); ++k)
                for (SparseMatrixC::InnerIterator it(h.matrix, k); it; ++it)
                    detail::assign_entry(dense(it.row(), it.col()), it.value());
        } else {
            for (Eigen::Index c = 0; c < dim; ++c)
                for (SparseMatrixC::InnerIterator it(h.matrix, idx[c]); it; ++it) {
                    const std::int32_t r = pos[it.row()];
                    if (r >= 0) detail::assign_entry(dense(r, c), it.value());
                }
        }
    };

    if (real_path) {
        Eigen::MatrixXd dense(dim, dim);
        fill_dense(dense);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            dense, opts.compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: solver failed");
        out.eigenvalues = es.eigenvalues();
        if (opts.compute_vectors) {
            out.has_vectors = true;
            out.real_vectors = true;
            out.vectors_real = es.eigenvectors();
        }
    } else {
        Eigen::MatrixXcd dense(dim, dim);
        fill_dense(dense);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            dense, opts.compute_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw std::runtime_error("diagonalize: solver failed");
        out.eigenvalues = es.eigenvalues();
        if (opts.compute_vectors) {
            out.has_vectors = true;
            out.real_vectors = false;
            out.vectors_complex = es.eigenvectors();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level-spacing statistics over the middle of the spectrum.
// ---------------------------------------------------------------------------

struct LevelStatistics {
    std::vector<double> spacings;  // normalized by the window mean
    std::vector<double> r_values;
    double mean_r = 0.0;
    double window_mean_spacing = 0.0;
    std::size_t dropped_degenerate = 0;
    std::size_t window_begin = 0, window_end = 0;  // index range used
    bool few_levels_warning = false;
};

/// Spacing and r-value statistics from the index window [N f0, N f1). Raw
/// spacings below degeneracy_tol are discarded before normalization; pass a
/// negative tolerance for the default 1e-10 * spectral width.
inline LevelStatistics level_spacing_stats(const Eigen::VectorXd& eigenvalues,
                                           std::pair<double, double> window = {0.25, 0.75},
                                           double degeneracy_tol = -1.0) {
    const auto N = static_cast<std::size_t>(eigenvalues.size());
    LevelStatistics out;
    out.few_levels_warning = N < 100;
    if (N < 3) throw std::invalid_argument("level_spacing_stats: need at least 3 levels");
    if (!(window.first >= 0.0 && window.second <= 1.0 && window.first < window.second))
        throw std::invalid_argument("level_spacing_stats: bad window fractions");
    if (degeneracy_tol < 0.0)
        degeneracy_tol = 1e-10 * (eigenvalues(N - 1) - eigenvalues(0));

    out.window_begin = static_cast<std::size_t>(window.first * N);
    out.window_end = static_cast<std::size_t>(window.second * N);

    std::vector<double> raw;
    raw.reserve(out.window_end - out.window_begin);
    for (std::size_t i = out.window_begin; i + 1 < out.window_end; ++i) {
        const double d = eigenvalues(i + 1) - eigenvalues(i);
        if (d < degeneracy_tol) {
            ++out.dropped_degenerate;
            continue;
        }
        raw.push_back(d);
    }
    if (raw.size() < 2)
        throw std::invalid_argument("level_spacing_stats: fewer than 3 retained levels");

    double mean = 0.0;
    for (double d : raw) mean += d;
    mean /= static_cast<double>(raw.size());
    out.window_mean_spacing = mean;

    out.spacings.reserve(raw.size());
    for (double d : raw) out.spacings.push_back(d / mean);

    out.r_values.reserve(raw.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < raw.size(); ++i) {
        const double r = std::min(raw[i], raw[i + 1]) / std::max(raw[i], raw[i + 1]);
        out.r_values.push_back(r);
        acc += r;
    }
    out.mean_r = acc / static_cast<double>(out.r_values.size());
    return out;
}

enum class ReferenceDistribution { Poisson, WignerDyson };

/// P(s) = e^{-s} (Poisson) or (pi/2) s e^{-pi s^2/4} (Wigner-Dyson surmise).
inline double reference_pdf(ReferenceDistribution kind, double s) {
    switch (kind) {
        case ReferenceDistribution::Poisson:
            return std::exp(-s);
        case ReferenceDistribution::WignerDyson:
            return 0.5 * M_PI * s * std::exp(-0.25 * M_PI * s * s);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Seeded reference spectra for calibration checks.
// ---------------------------------------------------------------------------

/// Levels with i.i.d. unit-exponential spacings (Poisson statistics).
inline Eigen::VectorXd synthetic_poisson_levels(Eigen::Index count, std::uint64_t seed) {
    RngStream rng(seed, "surrogate/poisson");
    Eigen::VectorXd e(count);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < count; ++i) {
        acc += -std::log(1.0 - rng.uniform01());
        e(i) = acc;
    }
    return e;
}

/// Eigenvalues of a GOE matrix (Wigner-Dyson statistics).
inline Eigen::VectorXd goe_levels(Eigen::Index dim, std::uint64_t seed) {
    RngStream rng(seed, "surrogate/goe");
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = rng.gaussian();
    Eigen::MatrixXd h = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace clockscar
