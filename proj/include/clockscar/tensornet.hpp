#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "clockscar/algebra.hpp"
#include "clockscar/models.hpp"

namespace clockscar {

// ---------------------------------------------------------------------------
// Matrix-product factors. State tensors carry one bond matrix per physical
// label; operator-valued (MPO) cores carry an n x n operator per bond entry.
// ---------------------------------------------------------------------------

struct MpsFactors {
    int phys_dim = 0;
    int bond_dim = 0;
    // site_tensors[site][p] is a bond_dim x bond_dim matrix.
    std::vector<std::vector<Eigen::MatrixXcd>> site_tensors;

    enum class Boundary { Trace, OpenVectors };
    Boundary boundary = Boundary::Trace;
    Eigen::VectorXcd left_vector, right_vector;  // used for OpenVectors

    int sites() const { return static_cast<int>(site_tensors.size()); }
};

struct MpoFactors {
    int phys_dim = 0;
    int bond_dim = 0;
    // cores[site] is a bond_dim x bond_dim grid (row-major, u*bond_dim+v) of
    // phys_dim x phys_dim operators; closure is an auxiliary-space trace.
    std::vector<std::vector<Eigen::MatrixXcd>> cores;

    int sites() const { return static_cast<int>(cores.size()); }
    const Eigen::MatrixXcd& core(int site, int u, int v) const {
        return cores[site][u * bond_dim + v];
    }
};

struct CoherentParams {
    Complex beta;
    std::optional<Complex> alpha;  // set for the two-parameter family
};

// ---------------------------------------------------------------------------
// Coherent-state MPS, alternating A (odd sites) / B (even sites) with trace
// closure; bond dimension n.
// ---------------------------------------------------------------------------

inline MpsFactors coherent_mps_tensors(int n, Complex beta, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    MpsFactors f;
    f.phys_dim = n;
    f.bond_dim = n;

    std::vector<Complex> beta_pow(n);
    beta_pow[0] = 1.0;
    for (int p = 1; p < n; ++p) beta_pow[p] = beta_pow[p - 1] * beta;

    auto make_site = [&](bool odd_site) {
        std::vector<Eigen::MatrixXcd> tensors(n);
        for (int p = 0; p < n; ++p) {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    Complex v = 0.0;
                    if (i == p && j == 0) v += beta_pow[p];
                    if (j - i == n - p) {
                        const int sgn_exp = odd_site ? (j + 1) : (n - j);
                        const double sign = (sgn_exp % 2 == 0) ? 1.0 : -1.0;
                        v += sign * beta_pow[p] / std::sin(M_PI * (n - j) / n);
                    }
                    m(i, j) = v;
                }
            }
            tensors[p] = m;
        }
        return tensors;
    };

    const auto a_site = make_site(true);
    const auto b_site = make_site(false);
    f.site_tensors.reserve(L);
    for (int s = 1; s <= L; ++s) f.site_tensors.push_back(s % 2 == 1 ? a_site : b_site);
    return f;
}

/// Dense contraction of an MPS to a state vector; exact, no truncation.
inline Eigen::VectorXcd contract_mps(const MpsFactors& f) {
    const int L = f.sites();
    const int n = f.phys_dim;
    BasisIndex basis(L, n);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(basis.dimension());

    // DFS over digit strings, sharing bond-matrix products across prefixes.
    std::vector<Eigen::MatrixXcd> stack(L + 1);
    stack[0] = Eigen::MatrixXcd::Identity(f.bond_dim, f.bond_dim);
    std::vector<int> digits(L, 0);
    std::int64_t index = 0;

    auto descend = [&](auto&& self, int depth) -> void {
        if (depth == L) {
            Complex amp;
            if (f.boundary == MpsFactors::Boundary::Trace) {
                amp = stack[L].trace();
            } else {
                amp = f.left_vector.adjoint() * stack[L] * f.right_vector;
            }
            out(index) = amp;
            return;
        }
        for (int p = 0; p < n; ++p) {
            digits[depth] = p;
            stack[depth + 1] = stack[depth] * f.site_tensors[depth][p];
            index = index * n + p;
            self(self, depth + 1);
            index /= n;
        }
    };
    descend(descend, 0);
    return out;
}

// ---------------------------------------------------------------------------
// MPO cores of exp(beta^n Q^+): the finite series expansion of each local
// term gives bond dimension n with entries
//   C^[l]_{i0} = (beta S^+)^i,
//   C^[l]_{ij} = (-1)^{(n+1)l+(n-j)} / sin(pi(n-j)/n) (beta S^+)^{n+i-j}, j != 0.
// ---------------------------------------------------------------------------

inline MpoFactors coherent_mpo_tensors(int n, Complex beta, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(n);

    std::vector<Eigen::MatrixXcd> bsp_pow(2 * n);
    bsp_pow[0] = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k < 2 * n; ++k) bsp_pow[k] = beta * (bsp_pow[k - 1] * alg.s_plus);

    MpoFactors f;
    f.phys_dim = n;
    f.bond_dim = n;
    f.cores.reserve(L);
    for (int l = 1; l <= L; ++l) {
        std::vector<Eigen::MatrixXcd> core(n * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (j == 0) {
                    core[i * n + j] = bsp_pow[i];
                } else {
                    const int sgn_exp = (n + 1) * l + (n - j);
                    const double sign = (sgn_exp % 2 == 0) ? 1.0 : -1.0;
                    core[i * n + j] = sign / std::sin(M_PI * (n - j) / n) * bsp_pow[n + i - j];
                }
            }
        }
        f.cores.push_back(std::move(core));
    }
    return f;
}

/// Apply an MPO (trace closure) to a dense state vector. The auxiliary bond
/// pair is carried alongside the state, giving O(L n D^3 dim) work.
inline Eigen::VectorXcd apply_mpo(const MpoFactors& f, const Eigen::VectorXcd& state) {
    const int L = f.sites();
    const int n = f.phys_dim;
    const int D = f.bond_dim;
    BasisIndex basis(L, n);
    const std::int64_t dim = basis.dimension();
    if (state.size() != dim) throw std::invalid_argument("apply_mpo: state dimension mismatch");

    // Z[(u0*D + u), x]: open left bond u0, running right bond u.
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(D * D, dim);
    for (int u = 0; u < D; ++u) z.row(u * D + u) = state.transpose();

    for (int s = 0; s < L; ++s) {
        const std::int64_t stride = ipow(n, L - 1 - s);
        Eigen::MatrixXcd znew = Eigen::MatrixXcd::Zero(D * D, dim);
        for (std::int64_t x = 0; x < dim; ++x) {
            const int pin = static_cast<int>((x / stride) % n);
            const std::int64_t base = x - pin * stride;
            for (int u = 0; u < D; ++u) {
                for (int v = 0; v < D; ++v) {
                    const Eigen::MatrixXcd& op = f.core(s, u, v);
                    for (int pout = 0; pout < n; ++pout) {
                        const Complex c = op(pout, pin);
                        if (c == Complex(0.0, 0.0)) continue;
                        const std::int64_t xo = base + static_cast<std::int64_t>(pout) * stride;
                        for (int u0 = 0; u0 < D; ++u0)
                            znew(u0 * D + v, xo) += c * z(u0 * D + u, x);
                    }
                }
            }
        }
        z.swap(znew);
    }

    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim);
    for (int u = 0; u < D; ++u) out += z.row(u * D + u).transpose();
    return out;
}

/// Coherent state as the truncated exponential series sum_k beta^{nk} (Q^+)^k / k! |vac>,
/// which terminates once the raising power annihilates.
inline Eigen::VectorXcd coherent_state_series(int n, int L, Complex beta) {
    ModelSpec{n, L, 0.0, {}}.validate();
    BasisIndex basis(L, n);
    const SparseOperator qp = build_q_plus(n, L);
    Eigen::VectorXcd term = Eigen::VectorXcd::Zero(basis.dimension());
    term(0) = 1.0;
    Eigen::VectorXcd out = term;
    const Complex bn = std::pow(beta, n);
    const int kmax = ((n - 1) * L) / n;
    for (int k = 1; k <= kmax + 1; ++k) {
        term = (bn / double(k)) * (qp.matrix * term).eval();
        if (term.norm() == 0.0) break;
        out += term;
    }
    return out;
}

/// Coherent state from the MPS contraction.
inline Eigen::VectorXcd coherent_state(int n, int L, Complex beta) {
    return contract_mps(coherent_mps_tensors(n, beta, L));
}

// ---------------------------------------------------------------------------
// Two-parameter family (n = 2): exp(alpha^2 Q_1^+) exp(beta^2 Q_2^+) as an
// MPO of bond dimension 8 with site-parity alternating cores.
// ---------------------------------------------------------------------------

inline MpoFactors two_param_mpo_tensors(Complex alpha, Complex beta, int L) {
    ModelSpec{2, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(2);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(2, 2);

    using Factor = std::array<Eigen::MatrixXcd, 4>;  // 2x2 grid, row-major
    auto ladder = [&](Complex g, double top_sign) -> Factor {
        return {id, top_sign * g * alg.s_plus, g * alg.s_plus, zero};
    };
    auto diag = [&](double sz_sign) -> Factor {
        return {id, zero, zero, sz_sign * alg.s_z};
    };

    MpoFactors f;
    f.phys_dim = 2;
    f.bond_dim = 8;
    f.cores.reserve(L);
    for (int j = 1; j <= L; ++j) {
        std::array<Factor, 3> fac;
        if (j % 2 == 1) {
            fac = {ladder(alpha, +1.0), ladder(beta, +1.0), diag(-1.0)};
        } else {
            fac = {ladder(alpha, -1.0), diag(+1.0), ladder(beta, +1.0)};
        }
        std::vector<Eigen::MatrixXcd> core(64);
        for (int u1 = 0; u1 < 2; ++u1)
            for (int u2 = 0; u2 < 2; ++u2)
                for (int u3 = 0; u3 < 2; ++u3)
                    for (int v1 = 0; v1 < 2; ++v1)
                        for (int v2 = 0; v2 < 2; ++v2)
                            for (int v3 = 0; v3 < 2; ++v3) {
                                const int u = (u1 * 2 + u2) * 2 + u3;
                                const int v = (v1 * 2 + v2) * 2 + v3;
                                core[u * 8 + v] = fac[0][u1 * 2 + v1] * fac[1][u2 * 2 + v2] *
                                                  fac[2][u3 * 2 + v3];
                            }
        f.cores.push_back(std::move(core));
    }
    return f;
}

/// Two-parameter coherent state exp(alpha^2 Q_1^+) exp(beta^2 Q_2^+) |vac>
/// from the bond-dimension-8 MPO.
inline Eigen::VectorXcd two_param_state(Complex alpha, Complex beta, int L) {
    BasisIndex basis(L, 2);
    Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(basis.dimension());
    vac(0) = 1.0;
    return apply_mpo(two_param_mpo_tensors(alpha, beta, L), vac);
}

/// Independent dense route: iterated nilpotent exponentials of Q_l^+ applied
/// to the vacuum, exp(g_m^2 Q_{l_m}^+) ... exp(g_1^2 Q_{l_1}^+) |vac>.
inline Eigen::VectorXcd multi_param_state_series(const std::vector<std::pair<int, Complex>>& factors,
                                                 int L) {
    BasisIndex basis(L, 2);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
    v(0) = 1.0;
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        const SparseOperator ql = build_q_l_plus(it->first, L);
        const Complex g2 = it->second * it->second;
        Eigen::VectorXcd term = v;
        for (int k = 1; k <= L + 1; ++k) {
            term = (g2 / double(k)) * (ql.matrix * term).eval();
            if (term.norm() == 0.0) break;
            v += term;
        }
    }
    return v;
}

struct TwoParamTowerState {
    int k1 = 0, k2 = 0;
    Eigen::VectorXcd state;  // normalized
};

/// All nonzero normalized states (Q_1^+)^{k1} (Q_2^+)^{k2} |vac> with
/// k1 + k2 <= L/2 (each factor raises the charge by 2).
inline std::vector<TwoParamTowerState> two_param_tower_family(int L) {
    BasisIndex basis(L, 2);
    const SparseOperator q1 = build_q_l_plus(1, L);
    const SparseOperator q2 = build_q_l_plus(2, L);
    std::vector<TwoParamTowerState> out;
    Eigen::VectorXcd base = Eigen::VectorXcd::Zero(basis.dimension());
    base(0) = 1.0;
    for (int k2 = 0; 2 * k2 <= L; ++k2) {
        if (k2 > 0) {
            base = q2.matrix * base;
            const double nrm = base.norm();
            if (nrm <= 1e-10) break;
            base /= nrm;
        }
        Eigen::VectorXcd v = base;
        for (int k1 = 0; 2 * (k1 + k2) <= L; ++k1) {
            if (k1 > 0) {
                v = q1.matrix * v;
                const double nrm = v.norm();
                if (nrm <= 1e-10) break;
                v /= nrm;
            }
            out.push_back({k1, k2, v});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scar tower (Q^+)^k |vac>.
// ---------------------------------------------------------------------------

struct ScarTowerState {
    Eigen::VectorXcd state;  // normalized; zero vector when annihilated
    bool is_zero = false;
    int k = 0;
};

/// Normalized (Q^+)^k|vac>. Annihilation is reported explicitly instead of
/// returning numerical noise.
inline ScarTowerState scar_tower(int n, int L, int k) {
    if (k < 0) throw std::invalid_argument("scar_tower: k must be >= 0");
    BasisIndex basis(L, n);
    ScarTowerState out;
    out.k = k;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dimension());
    v(0) = 1.0;
    if (k == 0) {
        out.state = v;
        return out;
    }
    const SparseOperator qp = build_q_plus(n, L);
    for (int i = 0; i < k; ++i) {
        v = qp.matrix * v;
        const double nrm = v.norm();
        if (nrm <= 1e-10) {  // operator norm is O(L); exact zeros land far below
            out.is_zero = true;
            out.state = Eigen::VectorXcd::Zero(basis.dimension());
            return out;
        }
        v /= nrm;
    }
    out.state = v;
    return out;
}

/// All nonzero normalized tower states, k = 0 .. floor((n-1)L/n).
inline std::vector<ScarTowerState> scar_tower_family(int n, int L) {
    std::vector<ScarTowerState> out;
    const int kmax = ((n - 1) * L) / n;
    for (int k = 0; k <= kmax; ++k) {
        ScarTowerState s = scar_tower(n, L, k);
        if (!s.is_zero) out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Open-boundary tower states (n = 2) in the single-site-rotated frame where
// Q^+ = sum_{j<L} S_j^+ S_{j+1}^+; used by the closed-form entropy checks.
// ---------------------------------------------------------------------------

inline SparseOperator build_q_plus_obc(int L) {
    ModelSpec{2, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(2);
    BasisIndex basis(L, 2);
    const Eigen::MatrixXcd bond = Eigen::kroneckerProduct(alg.s_plus, alg.s_plus);
    std::vector<TripletC> trips;
    for (int j = 1; j < L; ++j) {
        const int jsites[2] = {j, j + 1};
        detail::accumulate_embedded(trips, bond, jsites, basis);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = false;
    return op;
}

/// Counter MPS for (Q^+_obc)^k|vac>: M_0 passes even auxiliary counters
/// through, M_1 advances the counter; boundary pair <<0|, |2k>>.
inline MpsFactors tower_mps_obc(int L, int k) {
    if (k < 0 || 2 * k > L) throw std::invalid_argument("tower_mps_obc: need 0 <= 2k <= L");
    const int d = 2 * k + 1;
    Eigen::MatrixXcd m0 = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd m1 = Eigen::MatrixXcd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (i % 2 == 0) m0(i, i) = 1.0;
        if (i + 1 < d) m1(i, i + 1) = 1.0;
    }
    MpsFactors f;
    f.phys_dim = 2;
    f.bond_dim = d;
    f.boundary = MpsFactors::Boundary::OpenVectors;
    f.left_vector = Eigen::VectorXcd::Zero(d);
    f.left_vector(0) = 1.0;
    f.right_vector = Eigen::VectorXcd::Zero(d);
    f.right_vector(2 * k) = 1.0;
    f.site_tensors.assign(L, {m0, m1});
    return f;
}

// ---------------------------------------------------------------------------
// Schmidt decomposition across a bond cut.
// ---------------------------------------------------------------------------

struct SchmidtDecomposition {
    Eigen::VectorXd values;   // singular values, descending
    Eigen::MatrixXcd left;    // left factors as columns
    Eigen::MatrixXcd right;   // right factors as columns
};

/// Schmidt decomposition of a normalized state across the cut after `cut`
/// sites; sum of squared values is 1.
inline SchmidtDecomposition schmidt_decompose(const Eigen::VectorXcd& state, int n, int L,
                                              int cut) {
    if (cut < 1 || cut >= L) throw std::invalid_argument("schmidt_decompose: cut must be in 1..L-1");
    BasisIndex basis(L, n);
    if (state.size() != basis.dimension())
        throw std::invalid_argument("schmidt_decompose: state dimension mismatch");
    const std::int64_t dl = ipow(n, cut);
    const std::int64_t dr = ipow(n, L - cut);
    // Site 1 is the most significant digit, so the left block is the slow index.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        state.data(), dl, dr);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    out.values = svd.singularValues();
    out.left = svd.matrixU();
    out.right = svd.matrixV().conjugate();
    return out;
}

}  // namespace clockscar
