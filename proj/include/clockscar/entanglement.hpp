#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "clockscar/eigensolve.hpp"
#include "clockscar/tensornet.hpp"

namespace clockscar {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Von Neumann entanglement entropy (natural log) of the left block.
// ---------------------------------------------------------------------------

/// Entropy from squared Schmidt values; weights below 1e-14 are dropped so
/// numerical noise cannot produce NaN through 0 ln 0.
inline double entropy_from_weights(const Eigen::VectorXd& p) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > 1e-14) s -= p(i) * std::log(p(i));
    return s;
}

inline double entropy_from_schmidt_values(const Eigen::VectorXd& svals) {
    Eigen::VectorXd p = svals.array().square();
    return entropy_from_weights(p);
}

inline double von_neumann_ee(const Eigen::VectorXcd& state, int n, int L, int cut) {
    BasisIndex basis(L, n);
    if (state.size() != basis.dimension())
        throw std::invalid_argument("von_neumann_ee: state dimension mismatch");
    const std::int64_t dl = ipow(n, cut);
    const std::int64_t dr = ipow(n, L - cut);
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        state.data(), dl, dr);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return entropy_from_schmidt_values(svd.singularValues());
}

inline double von_neumann_ee(const Eigen::VectorXcd& state, int n, int L) {
    return von_neumann_ee(state, n, L, L / 2);
}

/// Independent route through the reduced density matrix rho_A = M M^dag.
inline double reduced_density_entropy(const Eigen::VectorXcd& state, int n, int L, int cut) {
    const std::int64_t dl = ipow(n, cut);
    const std::int64_t dr = ipow(n, L - cut);
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        state.data(), dl, dr);
    Eigen::MatrixXcd rho;
    if (dl <= dr)
        rho = m * m.adjoint();
    else
        rho = (m.adjoint() * m).conjugate();  // same nonzero spectrum
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    Eigen::VectorXd p = es.eigenvalues().cwiseMax(0.0);
    return entropy_from_weights(p);
}

/// Mean half-cut entropy of a Haar-random state, (L/2) ln n - 1/2.
inline double page_value(int L, int n) { return 0.5 * L * std::log(double(n)) - 0.5; }

// ---------------------------------------------------------------------------
// Scar identification by overlap against candidate states, clustered over
// numerically degenerate eigenvalues.
// ---------------------------------------------------------------------------

struct ScarTag {
    enum class Kind { None, Tower, OneMagnon };
    Kind kind = Kind::None;
    int k = 0;
    int k2 = -1;  // second raising index for the two-parameter tower

    std::string label() const {
        switch (kind) {
            case Kind::None: return "none";
            case Kind::Tower:
                if (k2 >= 0)
                    return "tower(" + std::to_string(k) + "," + std::to_string(k2) + ")";
                return "tower(" + std::to_string(k) + ")";
            case Kind::OneMagnon: return "one_magnon(" + std::to_string(k) + ")";
        }
        return "none";
    }
};

struct ScarMatch {
    bool matched = false;
    double overlap = 0.0;          // summed squared overlap of the best cluster
    Eigen::Index cluster_begin = 0, cluster_end = 0;
    Eigen::Index best_index = 0;   // largest individual overlap inside the cluster
    double energy = 0.0;           // eigenvalue at best_index
};

/// Eigenvalue clusters: maximal runs with consecutive gaps below tol.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate_clusters(
    const Eigen::VectorXd& eigenvalues, double tol) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    const Eigen::Index n = eigenvalues.size();
    Eigen::Index begin = 0;
    for (Eigen::Index i = 1; i <= n; ++i) {
        if (i == n || eigenvalues(i) - eigenvalues(i - 1) > tol) {
            out.emplace_back(begin, i);
            begin = i;
        }
    }
    return out;
}

inline ScarMatch identify_scar(const EigenDecomposition& dec, const Eigen::VectorXcd& candidate,
                               double threshold = 0.99, double degeneracy_tol = -1.0) {
    if (degeneracy_tol < 0.0) degeneracy_tol = 1e-9 * std::max(1.0, dec.spectral_width());
    const Eigen::VectorXcd amps = dec.overlaps(candidate);
    Eigen::VectorXd w = amps.cwiseAbs2();

    ScarMatch best;
    for (auto [lo, hi] : degenerate_clusters(dec.eigenvalues, degeneracy_tol)) {
        double sum = 0.0;
        Eigen::Index arg = lo;
        for (Eigen::Index i = lo; i < hi; ++i) {
            sum += w(i);
            if (w(i) > w(arg)) arg = i;
        }
        if (sum > best.overlap) {
            best.overlap = sum;
            best.cluster_begin = lo;
            best.cluster_end = hi;
            best.best_index = arg;
            best.energy = dec.eigenvalues(arg);
        }
    }
    best.matched = best.overlap >= threshold;
    return best;
}

inline std::vector<ScarMatch> identify_scars(const EigenDecomposition& dec,
                                             const std::vector<Eigen::VectorXcd>& candidates,
                                             double threshold = 0.99,
                                             double degeneracy_tol = -1.0) {
    std::vector<ScarMatch> out;
    out.reserve(candidates.size());
    for (const auto& c : candidates) out.push_back(identify_scar(dec, c, threshold, degeneracy_tol));
    return out;
}

// ---------------------------------------------------------------------------
// Entropy-vs-energy scatter over a full eigensystem.
// ---------------------------------------------------------------------------

struct EEPoint {
    double energy = 0.0;
    double entropy = 0.0;
    Eigen::Index index = 0;
    ScarTag tag;
    double overlap_with_tag = 0.0;
};

inline std::vector<EEPoint> ee_scatter(const EigenDecomposition& dec, int n, int L, int cut) {
    if (!dec.has_vectors) throw std::runtime_error("ee_scatter: eigenvectors not retained");
    std::vector<EEPoint> out(dec.size());
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        out[i].energy = dec.eigenvalues(i);
        out[i].index = i;
        out[i].entropy = von_neumann_ee(dec.eigenvector_full(i), n, L, cut);
    }
    return out;
}

/// Tag scatter points by overlap matching. Every eigenstate of a matched
/// cluster receives the candidate's tag (degenerate clusters share it);
/// earlier tags are not overwritten.
inline std::vector<ScarMatch> tag_scar_points(std::vector<EEPoint>& points,
                                              const EigenDecomposition& dec,
                                              const std::vector<std::pair<ScarTag, Eigen::VectorXcd>>& candidates,
                                              double threshold = 0.99,
                                              double degeneracy_tol = -1.0) {
    std::vector<ScarMatch> matches;
    matches.reserve(candidates.size());
    for (const auto& [tag, state] : candidates) {
        ScarMatch m = identify_scar(dec, state, threshold, degeneracy_tol);
        if (m.matched) {
            for (Eigen::Index i = m.cluster_begin; i < m.cluster_end; ++i) {
                if (points[i].tag.kind == ScarTag::Kind::None) {
                    points[i].tag = tag;
                    points[i].overlap_with_tag = m.overlap;
                }
            }
        }
        matches.push_back(m);
    }
    return matches;
}

// ---------------------------------------------------------------------------
// Diagonal expectation values of an observable over all eigenstates.
// ---------------------------------------------------------------------------

inline Eigen::VectorXd observable_expectation(const EigenDecomposition& dec,
                                              const SparseOperator& obs) {
    if (!dec.has_vectors) throw std::runtime_error("observable_expectation: eigenvectors not retained");
    Eigen::VectorXd out(dec.size());
    for (Eigen::Index i = 0; i < dec.size(); ++i) {
        const Eigen::VectorXcd v = dec.eigenvector_full(i);
        out(i) = (v.adjoint() * (obs.matrix * v)).value().real();
    }
    return out;
}

/// Direct expectation <state|obs|state> for non-eigenstate probes.
inline double observable_expectation(const Eigen::VectorXcd& state, const SparseOperator& obs) {
    return (state.adjoint() * (obs.matrix * state)).value().real();
}

// ---------------------------------------------------------------------------
// Closed-form entropy of the half-filled open-boundary tower state.
// The Schmidt weights are c_l c_{L/2-l} / N with parity-split binomial
// coefficients and N = binom(3L/4, L/4) by the generalized Vandermonde
// identity; Gibbs' inequality bounds the entropy by ln(L/2 + 1).
// ---------------------------------------------------------------------------

inline BigInt big_binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

struct ClosedFormEE {
    int L = 0;
    std::vector<BigInt> coefficients;  // c_l, l = 0..L/2
    BigInt normalization;              // N = sum_l c_l c_{L/2-l}
    double entropy = 0.0;
    double bound = 0.0;  // ln(L/2 + 1)
};

inline BigInt tower_schmidt_coefficient(int L, int l) {
    if (l % 2 == 0) return big_binomial(L / 2 - l / 2, l / 2);
    return big_binomial(L / 2 - (l + 1) / 2, (l - 1) / 2);
}

inline ClosedFormEE scar_ee_closed_form(int L) {
    if (L < 4 || L % 4 != 0)
        throw std::invalid_argument("scar_ee_closed_form: L must be a positive multiple of 4");
    ClosedFormEE out;
    out.L = L;
    out.coefficients.resize(L / 2 + 1);
    for (int l = 0; l <= L / 2; ++l) out.coefficients[l] = tower_schmidt_coefficient(L, l);
    out.normalization = 0;
    for (int l = 0; l <= L / 2; ++l)
        out.normalization += out.coefficients[l] * out.coefficients[L / 2 - l];

    const double nrm = out.normalization.convert_to<double>();
    double s = 0.0;
    for (int l = 0; l <= L / 2; ++l) {
        const BigInt w = out.coefficients[l] * out.coefficients[L / 2 - l];
        if (w == 0) continue;
        const double p = w.convert_to<double>() / nrm;
        s -= p * std::log(p);
    }
    out.entropy = s;
    out.bound = std::log(0.5 * L + 1.0);
    return out;
}

/// Numerical half-cut entropy of the normalized open-boundary tower state
/// (Q^+_obc)^k |vac> built from dense raising powers.
inline double scar_ee_numerical_obc(int L, int k) {
    ModelSpec{2, L, 0.0, {}}.validate();
    if (k == 0) return 0.0;
    BasisIndex basis(L, 2);
    const SparseOperator qp = build_q_plus_obc(L);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
    v(0) = 1.0;
    for (int i = 0; i < k; ++i) {
        v = qp.matrix * v;
        const double nrm = v.norm();
        if (nrm == 0.0) throw std::invalid_argument("scar_ee_numerical_obc: power annihilates");
        v /= nrm;
    }
    return von_neumann_ee(v, 2, L, L / 2);
}

// ---------------------------------------------------------------------------
// One-magnon candidates (n = 3): momentum combinations of |2..212..2>.
// Each basis magnon state is a product across any cut, so the k = 0 and
// k = L/2 momentum states have half-cut entropy exactly ln 2.
// ---------------------------------------------------------------------------

inline Eigen::VectorXcd one_magnon_state(int L, int momentum_index) {
    BasisIndex basis(L, 3);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
    std::vector<int> digits(L, 2);
    for (int j = 0; j < L; ++j) {
        digits[j] = 1;
        const double phase = 2.0 * M_PI * momentum_index * j / L;
        v(basis.encode(digits)) = std::exp(Complex(0.0, phase));
        digits[j] = 2;
    }
    v.normalize();
    return v;
}

inline std::vector<Eigen::VectorXcd> one_magnon_family(int L) {
    std::vector<Eigen::VectorXcd> out;
    out.reserve(L);
    for (int m = 0; m < L; ++m) out.push_back(one_magnon_state(L, m));
    return out;
}

}  // namespace clockscar
