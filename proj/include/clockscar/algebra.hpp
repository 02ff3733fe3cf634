#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clockscar {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;
using TripletC = Eigen::Triplet<Complex>;

inline constexpr std::int64_t kMaxHilbertDim = std::int64_t(1) << 24;

inline std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

inline Complex omega_root(int n) { return std::exp(Complex(0.0, 2.0 * M_PI / n)); }

// ---------------------------------------------------------------------------
// On-site clock/spin operators.
//
// Basis convention: |p>, p = 0..n-1, with S^z|p> = (p - (n-1)/2)|p>, so the
// fully polarized state |0...0> carries the lowest weight. S^+ raises the
// label, S^+|p> = |p+1>, tau|p> = omega^p |p>, sigma|p> = |p+1 mod n>.
// ---------------------------------------------------------------------------

enum class LocalOp { Tau, Sigma, SPlus, SMinus, SZ };

inline Eigen::MatrixXcd local_operator(LocalOp kind, int n) {
    if (n < 2) throw std::invalid_argument("local_operator: local dimension must be >= 2");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    const Complex w = omega_root(n);
    switch (kind) {
        case LocalOp::Tau:
            for (int p = 0; p < n; ++p) m(p, p) = std::pow(w, p);
            break;
        case LocalOp::Sigma:
            for (int p = 0; p < n; ++p) m((p + 1) % n, p) = 1.0;
            break;
        case LocalOp::SPlus:
            for (int p = 0; p + 1 < n; ++p) m(p + 1, p) = 1.0;
            break;
        case LocalOp::SMinus:
            for (int p = 0; p + 1 < n; ++p) m(p, p + 1) = 1.0;
            break;
        case LocalOp::SZ:
            for (int p = 0; p < n; ++p) m(p, p) = p - 0.5 * (n - 1);
            break;
    }
    return m;
}

struct LocalAlgebra {
    int n = 0;
    Complex omega;
    Eigen::MatrixXcd tau, sigma, s_plus, s_minus, s_z;

    static LocalAlgebra make(int n) {
        if (n < 2) throw std::invalid_argument("LocalAlgebra: local dimension must be >= 2");
        LocalAlgebra a;
        a.n = n;
        a.omega = omega_root(n);
        a.tau = local_operator(LocalOp::Tau, n);
        a.sigma = local_operator(LocalOp::Sigma, n);
        a.s_plus = local_operator(LocalOp::SPlus, n);
        a.s_minus = local_operator(LocalOp::SMinus, n);
        a.s_z = local_operator(LocalOp::SZ, n);
        return a;
    }
};

// ---------------------------------------------------------------------------
// Many-body product basis. Site 1 is the most significant digit, so a
// half-chain bipartition is a contiguous index split.
// ---------------------------------------------------------------------------

struct BasisIndex {
    int sites = 0;      // L
    int local_dim = 0;  // n

    BasisIndex(int L, int n) : sites(L), local_dim(n) {
        if (L < 1 || n < 2) throw std::invalid_argument("BasisIndex: need L >= 1, n >= 2");
        if (dimension() > kMaxHilbertDim)
            throw std::invalid_argument("BasisIndex: Hilbert dimension exceeds desk-scale cap");
    }

    std::int64_t dimension() const { return ipow(local_dim, sites); }

    std::int64_t encode(std::span<const int> digits) const {
        std::int64_t idx = 0;
        for (int p : digits) idx = idx * local_dim + p;
        return idx;
    }

    /// Digit at 0-based site s (s = 0 is the most significant / paper site 1).
    int digit(std::int64_t index, int site) const {
        return static_cast<int>((index / ipow(local_dim, sites - 1 - site)) % local_dim);
    }

    void decode(std::int64_t index, std::span<int> out) const {
        for (int s = sites - 1; s >= 0; --s) {
            out[s] = static_cast<int>(index % local_dim);
            index /= local_dim;
        }
    }

    std::vector<int> decode(std::int64_t index) const {
        std::vector<int> d(sites);
        decode(index, d);
        return d;
    }

    double digit_sum_charge(std::int64_t index) const {
        std::int64_t s = 0;
        for (int k = 0; k < sites; ++k) s += digit(index, k);
        return static_cast<double>(s) - 0.5 * sites * (local_dim - 1);
    }
};

// ---------------------------------------------------------------------------
// Sparse many-body operator.
// ---------------------------------------------------------------------------

struct SectorBlock {
    double charge = 0.0;
    std::vector<std::int64_t> indices;
};

struct SparseOperator {
    SparseMatrixC matrix;
    bool hermitian = false;
    std::optional<std::vector<SectorBlock>> sector_blocks;

    std::int64_t dimension() const { return matrix.rows(); }
};

inline double frobenius_norm(const SparseMatrixC& m) {
    double s = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMatrixC::InnerIterator it(m, k); it; ++it) s += std::norm(it.value());
    return std::sqrt(s);
}

inline bool is_hermitian(const SparseMatrixC& m, double rtol = 1e-12) {
    SparseMatrixC d = SparseMatrixC(m.adjoint()) - m;
    double nm = frobenius_norm(m);
    return frobenius_norm(d) <= rtol * std::max(1.0, nm);
}

inline SparseMatrixC commutator(const SparseMatrixC& a, const SparseMatrixC& b) {
    return SparseMatrixC(a * b) - SparseMatrixC(b * a);
}

/// Dimension-independent commutator residual |[A,B]|_F / (|A|_F |B|_F).
inline double scaled_commutator_norm(const SparseMatrixC& a, const SparseMatrixC& b) {
    double na = frobenius_norm(a), nb = frobenius_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return frobenius_norm(commutator(a, b)) / (na * nb);
}

// ---------------------------------------------------------------------------
// Embedding of k-site local operators, with periodic wrap.
// ---------------------------------------------------------------------------

namespace detail {

/// Accumulate triplets of scale * (op acting on `sites`, identity elsewhere).
/// Sites are 1-based with periodic wrap (site L+1 means site 1); the first
/// listed site is the most significant factor of the local operator.
inline void accumulate_embedded(std::vector<TripletC>& out, const Eigen::MatrixXcd& op,
                                std::span<const int> sites_1based, const BasisIndex& basis,
                                Complex scale = Complex(1.0, 0.0)) {
    const int L = basis.sites;
    const int n = basis.local_dim;
    const int k = static_cast<int>(sites_1based.size());
    const std::int64_t wdim = ipow(n, k);
    if (op.rows() != wdim || op.cols() != wdim)
        throw std::invalid_argument("embed: operator dimension does not match site count");

    std::vector<int> sites(k);
    for (int i = 0; i < k; ++i) {
        int s = sites_1based[i];
        sites[i] = ((s - 1) % L + L) % L;  // 0-based after wrap
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            if (sites[i] == sites[j]) throw std::invalid_argument("embed: repeated site after wrap");

    std::vector<std::int64_t> strides(k);
    for (int i = 0; i < k; ++i) strides[i] = ipow(n, L - 1 - sites[i]);

    const std::int64_t dim = basis.dimension();
    std::vector<int> wdigits(k), rdigits(k);
    for (std::int64_t col = 0; col < dim; ++col) {
        std::int64_t cw = 0;
        std::int64_t base = col;
        for (int i = 0; i < k; ++i) {
            wdigits[i] = static_cast<int>((col / strides[i]) % n);
            cw = cw * n + wdigits[i];
            base -= static_cast<std::int64_t>(wdigits[i]) * strides[i];
        }
        for (std::int64_t rw = 0; rw < wdim; ++rw) {
            const Complex v = op(rw, cw);
            if (v == Complex(0.0, 0.0)) continue;
            std::int64_t t = rw;
            for (int i = k - 1; i >= 0; --i) {
                rdigits[i] = static_cast<int>(t % n);
                t /= n;
            }
            std::int64_t row = base;
            for (int i = 0; i < k; ++i) row += static_cast<std::int64_t>(rdigits[i]) * strides[i];
            out.emplace_back(row, col, scale * v);
        }
    }
}

inline SparseMatrixC from_triplets(std::int64_t dim, std::vector<TripletC>& trips) {
    SparseMatrixC m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    m.prune([](Eigen::Index, Eigen::Index, const Complex& v) {
        return v != Complex(0.0, 0.0);
    });
    m.makeCompressed();
    return m;
}

}  // namespace detail

inline SparseOperator embed(const Eigen::MatrixXcd& op, std::span<const int> sites_1based, int L,
                            int n) {
    BasisIndex basis(L, n);
    std::vector<TripletC> trips;
    detail::accumulate_embedded(trips, op, sites_1based, basis);
    SparseOperator result;
    result.matrix = detail::from_triplets(basis.dimension(), trips);
    result.hermitian = op.isApprox(op.adjoint(), 1e-12);
    return result;
}

inline SparseOperator embed(const Eigen::MatrixXcd& op, std::initializer_list<int> sites, int L,
                            int n) {
    return embed(op, std::span<const int>(sites.begin(), sites.size()), L, n);
}

// ---------------------------------------------------------------------------
// U(1) charge sectors. The total charge of a basis string is the digit sum
// shifted by -L(n-1)/2; the sector of charge q collects all strings with
// that value. An unattainable q yields an empty set.
// ---------------------------------------------------------------------------

inline std::vector<std::int64_t> charge_sector_basis(int L, int n, double q) {
    BasisIndex basis(L, n);
    const double target = q + 0.5 * L * (n - 1);
    const auto m = static_cast<std::int64_t>(std::llround(target));
    if (std::abs(target - static_cast<double>(m)) > 1e-9) return {};
    if (m < 0 || m > static_cast<std::int64_t>(L) * (n - 1)) return {};
    std::vector<std::int64_t> out;
    const std::int64_t dim = basis.dimension();
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        std::int64_t s = 0;
        std::int64_t t = idx;
        while (t > 0) {
            s += t % n;
            t /= n;
        }
        if (s == m) out.push_back(idx);
    }
    return out;
}

/// All sector blocks, keyed by charge; the blocks partition the basis.
inline std::vector<SectorBlock> all_sector_blocks(int L, int n) {
    BasisIndex basis(L, n);
    const int num = L * (n - 1) + 1;
    std::vector<SectorBlock> blocks(num);
    for (int m = 0; m < num; ++m) blocks[m].charge = m - 0.5 * L * (n - 1);
    const std::int64_t dim = basis.dimension();
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        std::int64_t s = 0;
        std::int64_t t = idx;
        while (t > 0) {
            s += t % n;
            t /= n;
        }
        blocks[s].indices.push_back(idx);
    }
    return blocks;
}

/// Projector onto the charge-q sector.
inline SparseOperator sector_projector(int L, int n, double q) {
    BasisIndex basis(L, n);
    auto idx = charge_sector_basis(L, n, q);
    std::vector<TripletC> trips;
    trips.reserve(idx.size());
    for (auto i : idx) trips.emplace_back(i, i, Complex(1.0, 0.0));
    SparseOperator p;
    p.matrix = detail::from_triplets(basis.dimension(), trips);
    p.hermitian = true;
    return p;
}

}  // namespace clockscar
