#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "clockscar/algebra.hpp"
#include "clockscar/rng.hpp"

namespace clockscar {

// ---------------------------------------------------------------------------
// Model parameters and disorder couplings.
// ---------------------------------------------------------------------------

struct PerturbationCoefficients {
    // n = 2: per-site weights for the three channels of the three-site
    // perturbation (projector on |010>, projector on |011>+|110>, mixing).
    std::array<std::vector<double>, 3> c{};

    // n = 3: per-site weight for each forbidden-window projector, in the
    // order of forbidden_window_states(3).
    std::vector<std::vector<double>> projector_weights;
    bool include_last_projector = true;

    std::uint64_t rng_seed = 0;

    static PerturbationCoefficients zero(int n, int L);
    static PerturbationCoefficients random_n2(int L, std::uint64_t seed,
                                              std::array<bool, 3> active = {true, true, true});
    static PerturbationCoefficients random_n3(int L, std::uint64_t seed, bool include_last);
};

struct ModelSpec {
    int n = 2;
    int L = 4;
    double h = 0.0;
    PerturbationCoefficients couplings;
    // Boundary is always periodic.

    void validate() const {
        if (n < 2) throw std::invalid_argument("ModelSpec: n must be >= 2");
        if (L < 2 || L % 2 != 0) throw std::invalid_argument("ModelSpec: L must be even and >= 2");
        if (!std::isfinite(h)) throw std::invalid_argument("ModelSpec: h must be finite");
    }
};

// ---------------------------------------------------------------------------
// Forbidden local windows. The coherent state has exactly zero amplitude on
// these window states, so rank-1 projectors onto them (with arbitrary site-
// resolved weights) annihilate the whole scar tower.
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::VectorXcd window_ket(int n, std::initializer_list<int> digits) {
    std::int64_t dim = 1, idx = 0;
    for (int d : digits) {
        dim *= n;
        idx = idx * n + d;
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(idx) = 1.0;
    return v;
}

}  // namespace detail

/// Window states with zero overlap against the coherent state, n = 2: |010>
/// and (|011>+|110>)/sqrt(2) on three consecutive sites.
inline std::vector<Eigen::VectorXcd> forbidden_window_states_n2() {
    using detail::window_ket;
    const double s2 = 1.0 / std::sqrt(2.0);
    std::vector<Eigen::VectorXcd> out;
    out.push_back(window_ket(2, {0, 1, 0}));
    out.push_back(s2 * (window_ket(2, {0, 1, 1}) + window_ket(2, {1, 1, 0})));
    return out;
}

/// The twelve three-site window states orthogonal to the n = 3 coherent
/// state. The last entry is the projector whose inclusion destroys the
/// one-magnon scars.
inline std::vector<Eigen::VectorXcd> forbidden_window_states_n3() {
    using detail::window_ket;
    auto k = [](int a, int b, int c) { return detail::window_ket(3, {a, b, c}); };
    const double s2 = 1.0 / std::sqrt(2.0);
    const double s3 = 1.0 / std::sqrt(3.0);
    std::vector<Eigen::VectorXcd> out;
    out.push_back(k(0, 1, 0));
    out.push_back(k(0, 2, 0));
    out.push_back(k(1, 1, 0));
    out.push_back(k(0, 1, 1));
    out.push_back(k(1, 1, 1));
    out.push_back(0.5 * (k(0, 1, 2) + k(0, 2, 1) + k(1, 2, 0) + k(2, 1, 0)));
    out.push_back(s2 * (k(0, 1, 2) - k(1, 2, 0)));
    out.push_back(s2 * (k(0, 2, 1) - k(2, 1, 0)));
    out.push_back(0.5 * (k(0, 2, 2) - k(1, 1, 2) - k(2, 1, 1) + k(2, 2, 0)));
    out.push_back(0.5 * (k(0, 2, 2) + k(1, 1, 2) - k(2, 1, 1) - k(2, 2, 0)));
    out.push_back(0.5 * s2 * (k(0, 2, 2) + k(1, 1, 2) + 2.0 * k(1, 2, 1) + k(2, 1, 1) + k(2, 2, 0)));
    out.push_back(s3 * (k(1, 2, 2) + k(2, 1, 2) + k(2, 2, 1)));
    return out;
}

/// Window states with zero overlap against the two-parameter coherent state
/// (n = 2, five consecutive sites): |00100> and (|00101>-|10100>)/sqrt(2).
inline std::vector<Eigen::VectorXcd> forbidden_window_states_two_param() {
    using detail::window_ket;
    const double s2 = 1.0 / std::sqrt(2.0);
    std::vector<Eigen::VectorXcd> out;
    out.push_back(window_ket(2, {0, 0, 1, 0, 0}));
    out.push_back(s2 * (window_ket(2, {0, 0, 1, 0, 1}) - window_ket(2, {1, 0, 1, 0, 0})));
    return out;
}

inline PerturbationCoefficients PerturbationCoefficients::zero(int n, int L) {
    PerturbationCoefficients p;
    if (n == 2) {
        for (auto& ch : p.c) ch.assign(L, 0.0);
    } else if (n == 3) {
        p.projector_weights.assign(forbidden_window_states_n3().size(), std::vector<double>(L, 0.0));
    }
    return p;
}

inline PerturbationCoefficients PerturbationCoefficients::random_n2(int L, std::uint64_t seed,
                                                                    std::array<bool, 3> active) {
    PerturbationCoefficients p;
    p.rng_seed = seed;
    RngStream rng(seed, "couplings/n2");
    for (int ch = 0; ch < 3; ++ch) {
        p.c[ch].resize(L);
        for (int j = 0; j < L; ++j) {
            double v = rng.uniform_pm1();  // one draw per site per channel
            p.c[ch][j] = active[ch] ? v : 0.0;
        }
    }
    return p;
}

inline PerturbationCoefficients PerturbationCoefficients::random_n3(int L, std::uint64_t seed,
                                                                    bool include_last) {
    PerturbationCoefficients p;
    p.rng_seed = seed;
    p.include_last_projector = include_last;
    RngStream rng(seed, "couplings/n3");
    const std::size_t np = forbidden_window_states_n3().size();
    p.projector_weights.assign(np, std::vector<double>(L, 0.0));
    for (std::size_t w = 0; w < np; ++w)
        for (int j = 0; j < L; ++j) p.projector_weights[w][j] = rng.uniform_pm1();
    return p;
}

// ---------------------------------------------------------------------------
// Hamiltonian and charge builders. All operators live in the frame of the
// self-dual U(1)-invariant clock chain under strict periodic wrap; the
// untransformed chain carries the compensating boundary twist (see
// build_h_orig).
// ---------------------------------------------------------------------------

/// Ferromagnetic eigenvalue of the clock chain, -L sum_a (n-2a) w^{a/2} / (2 sin(pi a/n)).
inline double ferromagnetic_energy(int n, int L) {
    Complex e = 0.0;
    for (int a = 1; a < n; ++a)
        e += (n - 2.0 * a) * std::exp(Complex(0.0, M_PI * a / n)) / (2.0 * std::sin(M_PI * a / n));
    return -L * e.real();  // imaginary parts cancel pairwise under a <-> n-a
}

inline SparseOperator build_h_n(int n, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(n);
    BasisIndex basis(L, n);

    // Per-bond and per-site local matrices summed over the clock index a.
    Eigen::MatrixXcd bond = Eigen::MatrixXcd::Zero(n * n, n * n);
    Eigen::MatrixXcd site = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd sp_a = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd sm_a = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd tau_a = Eigen::MatrixXcd::Identity(n, n);
    for (int a = 1; a < n; ++a) {
        sp_a = sp_a * alg.s_plus;
        sm_a = sm_a * alg.s_minus;
        tau_a = tau_a * alg.tau;
        const double c = 1.0 / (2.0 * std::sin(M_PI * a / n));
        const double sign = (a % 2 == 0) ? 1.0 : -1.0;
        Eigen::MatrixXcd hop = Eigen::MatrixXcd(Eigen::kroneckerProduct(sm_a, sp_a));
        bond -= c * n * sign * (hop + hop.adjoint());
        site -= c * (n - 2.0 * a) * std::exp(Complex(0.0, M_PI * a / n)) * tau_a;
    }

    std::vector<TripletC> trips;
    for (int j = 1; j <= L; ++j) {
        const int jsites[2] = {j, j + 1};
        detail::accumulate_embedded(trips, bond, jsites, basis);
        const int ssite[1] = {j};
        detail::accumulate_embedded(trips, site, ssite, basis);
    }
    SparseOperator h;
    h.matrix = detail::from_triplets(basis.dimension(), trips);
    h.hermitian = true;
    return h;
}

inline SparseOperator build_h_n(const ModelSpec& spec) { return build_h_n(spec.n, spec.L); }

/// Untransformed Hamiltonian of the clock chain. The wrap bond carries the
/// twist w^{-aL/2} per clock power so that frame_unitary conjugates it
/// exactly onto build_h_n for every even L (strict periodic wrap on both
/// sides only matches when the twist is trivial).
inline SparseOperator build_h_orig(int n, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(n);
    BasisIndex basis(L, n);
    const Complex twist = std::exp(Complex(0.0, -M_PI * L / n));  // omega^{-L/2}

    std::vector<TripletC> trips;
    for (int j = 1; j <= L; ++j) {
        const bool wrap = (j == L);
        Eigen::MatrixXcd bond = Eigen::MatrixXcd::Zero(n * n, n * n);
        Eigen::MatrixXcd site = Eigen::MatrixXcd::Zero(n, n);
        Eigen::MatrixXcd sp_a = Eigen::MatrixXcd::Identity(n, n);
        Eigen::MatrixXcd sm_a = Eigen::MatrixXcd::Identity(n, n);
        Eigen::MatrixXcd tau_a = Eigen::MatrixXcd::Identity(n, n);
        std::vector<Eigen::MatrixXcd> sp_pows(n), sm_pows(n);
        sp_pows[0] = sm_pows[0] = Eigen::MatrixXcd::Identity(n, n);
        for (int a = 1; a < n; ++a) {
            sp_pows[a] = sp_pows[a - 1] * alg.s_plus;
            sm_pows[a] = sm_pows[a - 1] * alg.s_minus;
        }
        for (int a = 1; a < n; ++a) {
            tau_a = tau_a * alg.tau;
            const Complex c = Complex(0.0, 1.0) / (1.0 - std::pow(alg.omega, -a));
            site += c * (2.0 * a - n) * tau_a;
            const Complex tw_up = wrap ? std::conj(std::pow(twist, n - a)) : Complex(1.0);
            const Complex tw_dn = wrap ? std::pow(twist, a) : Complex(1.0);
            bond += c * double(n) * tw_up *
                    Eigen::MatrixXcd(Eigen::kroneckerProduct(sp_pows[n - a], sm_pows[n - a]));
            bond -= c * double(n) * tw_dn *
                    Eigen::MatrixXcd(Eigen::kroneckerProduct(sm_pows[a], sp_pows[a]));
        }
        const int jsites[2] = {j, j + 1};
        detail::accumulate_embedded(trips, bond, jsites, basis);
        const int ssite[1] = {j};
        detail::accumulate_embedded(trips, site, ssite, basis);
    }
    SparseOperator h;
    h.matrix = detail::from_triplets(basis.dimension(), trips);
    h.hermitian = true;
    return h;
}

/// Diagonal unitary U with U H_orig U^{-1} = H_n (single-site Zeeman phases
/// exp[-i pi (1+1/n) j S_j^z], j = 1..L).
inline SparseOperator frame_unitary(int n, int L) {
    BasisIndex basis(L, n);
    const std::int64_t dim = basis.dimension();
    std::vector<TripletC> trips;
    trips.reserve(dim);
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        double phase = 0.0;
        for (int s = 0; s < L; ++s)
            phase += (s + 1) * (basis.digit(idx, s) - 0.5 * (n - 1));
        trips.emplace_back(idx, idx, std::exp(Complex(0.0, -M_PI * (1.0 + 1.0 / n) * phase)));
    }
    SparseOperator u;
    u.matrix = detail::from_triplets(dim, trips);
    u.hermitian = false;
    return u;
}

/// U(1) charge Q = sum_j S_j^z (diagonal).
inline SparseOperator build_charge_q(int n, int L) {
    BasisIndex basis(L, n);
    const std::int64_t dim = basis.dimension();
    std::vector<TripletC> trips;
    trips.reserve(dim);
    for (std::int64_t idx = 0; idx < dim; ++idx) {
        double q = basis.digit_sum_charge(idx);
        if (q != 0.0) trips.emplace_back(idx, idx, Complex(q, 0.0));
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(dim, trips);
    op.hermitian = true;
    return op;
}

/// Dual charge, transformed into the strict-PBC frame of build_h_n. The
/// conjugated shift picks up a site-parity sign on its wrap element,
/// sigma~_j = S^+ + (-1)^{(n+1)j} |0><n-1|, and each bond term reads
/// (-1)^a / (2i sin(pi a/n)) (sigma~_j^dag)^a (sigma~_{j+1})^a.
inline SparseOperator build_charge_q_hat(int n, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(n);
    BasisIndex basis(L, n);

    Eigen::MatrixXcd corner = Eigen::MatrixXcd::Zero(n, n);
    corner(0, n - 1) = 1.0;
    auto twisted_shift = [&](int site_1based) -> Eigen::MatrixXcd {
        const double sign = (((n + 1) * site_1based) % 2 == 0) ? 1.0 : -1.0;
        return alg.s_plus + sign * corner;
    };

    std::vector<TripletC> trips;
    for (int j = 1; j <= L; ++j) {
        const int jn = (j % L) + 1;
        const Eigen::MatrixXcd sj = twisted_shift(j);
        const Eigen::MatrixXcd sn = twisted_shift(jn);
        Eigen::MatrixXcd bond = Eigen::MatrixXcd::Zero(n * n, n * n);
        Eigen::MatrixXcd lj = Eigen::MatrixXcd::Identity(n, n);
        Eigen::MatrixXcd rn = Eigen::MatrixXcd::Identity(n, n);
        for (int a = 1; a < n; ++a) {
            lj = lj * sj.adjoint();
            rn = rn * sn;
            const double sign = (a % 2 == 0) ? 1.0 : -1.0;
            const Complex c = sign / (Complex(0.0, 2.0) * std::sin(M_PI * a / n));
            bond += c * Eigen::MatrixXcd(Eigen::kroneckerProduct(lj, rn));
        }
        const int jsites[2] = {j, j + 1};
        detail::accumulate_embedded(trips, bond, jsites, basis);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = true;
    return op;
}

/// Onsager raising element Q^+ = sum_{j,a} (-1)^{(n+1)j+a}/sin(pi a/n)
/// (S_j^+)^a (S_{j+1}^+)^{n-a}; raises the total charge by n.
inline SparseOperator build_q_plus(int n, int L) {
    ModelSpec{n, L, 0.0, {}}.validate();
    const LocalAlgebra alg = LocalAlgebra::make(n);
    BasisIndex basis(L, n);

    std::vector<Eigen::MatrixXcd> sp_pows(n + 1);
    sp_pows[0] = Eigen::MatrixXcd::Identity(n, n);
    for (int a = 1; a <= n; ++a) sp_pows[a] = sp_pows[a - 1] * alg.s_plus;

    std::vector<TripletC> trips;
    for (int j = 1; j <= L; ++j) {
        Eigen::MatrixXcd bond = Eigen::MatrixXcd::Zero(n * n, n * n);
        for (int a = 1; a < n; ++a) {
            const double sign = (((n + 1) * j + a) % 2 == 0) ? 1.0 : -1.0;
            bond += sign / std::sin(M_PI * a / n) *
                    Eigen::MatrixXcd(Eigen::kroneckerProduct(sp_pows[a], sp_pows[n - a]));
        }
        const int jsites[2] = {j, j + 1};
        detail::accumulate_embedded(trips, bond, jsites, basis);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = false;
    return op;
}

/// Longer-range Onsager raising elements for n = 2,
/// Q_l^+ = sum_j (-1)^{j+1} S_j^+ (prod_{k=j+1}^{j+l-1} S_k^z) S_{j+l}^+,
/// with the proportionality constant fixed to 1. Q_1^+ equals build_q_plus(2, L).
inline SparseOperator build_q_l_plus(int l, int L) {
    ModelSpec{2, L, 0.0, {}}.validate();
    if (l < 1 || 2 * l >= L) throw std::invalid_argument("build_q_l_plus: need 1 <= l < L/2");
    const LocalAlgebra alg = LocalAlgebra::make(2);
    BasisIndex basis(L, 2);

    Eigen::MatrixXcd window = alg.s_plus;
    for (int k = 1; k < l; ++k)
        window = Eigen::MatrixXcd(Eigen::kroneckerProduct(window, alg.s_z)).eval();
    window = Eigen::MatrixXcd(Eigen::kroneckerProduct(window, alg.s_plus)).eval();

    std::vector<TripletC> trips;
    std::vector<int> sites(l + 1);
    for (int j = 1; j <= L; ++j) {
        for (int k = 0; k <= l; ++k) sites[k] = j + k;
        const Complex sign = (j % 2 == 1) ? 1.0 : -1.0;
        detail::accumulate_embedded(trips, window, sites, basis, sign);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = false;
    return op;
}

// ---------------------------------------------------------------------------
// Scar-preserving disordered perturbations.
// ---------------------------------------------------------------------------

namespace detail {

/// Sum over sites j of weight_j * (window operator on sites j-1..j+width-2),
/// i.e. windows centred per the three-site convention (j-1, j, j+1).
inline void accumulate_windows(std::vector<TripletC>& trips, const Eigen::MatrixXcd& window_op,
                               std::span<const double> weights, const BasisIndex& basis,
                               int width) {
    const int L = basis.sites;
    std::vector<int> sites(width);
    const int offset = (width - 1) / 2;
    for (int j = 1; j <= L; ++j) {
        if (weights[j - 1] == 0.0) continue;
        for (int k = 0; k < width; ++k) sites[k] = j - offset + k;
        accumulate_embedded(trips, window_op, sites, basis, Complex(weights[j - 1], 0.0));
    }
}

}  // namespace detail

/// Three-site perturbation for n = 2: per site j, the channel weights multiply
/// the projector on |010>, the projector on |011>+|110> (normalized), and the
/// unnormalized mixing term |010>(<011|+<110|) + h.c.
inline SparseOperator build_perturbation_n2(int L, const PerturbationCoefficients& pc) {
    ModelSpec{2, L, 0.0, {}}.validate();
    BasisIndex basis(L, 2);
    const auto wins = forbidden_window_states_n2();
    const Eigen::VectorXcd& w010 = wins[0];
    const Eigen::VectorXcd wsym = std::sqrt(2.0) * wins[1];  // |011> + |110>

    Eigen::MatrixXcd p1 = w010 * w010.adjoint();
    Eigen::MatrixXcd p2 = 0.5 * wsym * wsym.adjoint();
    Eigen::MatrixXcd p3 = w010 * wsym.adjoint() + wsym * w010.adjoint();

    std::vector<TripletC> trips;
    detail::accumulate_windows(trips, p1, pc.c[0], basis, 3);
    detail::accumulate_windows(trips, p2, pc.c[1], basis, 3);
    detail::accumulate_windows(trips, p3, pc.c[2], basis, 3);
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = true;
    return op;
}

/// Three-site perturbation for n = 3: rank-1 projectors onto the forbidden
/// window list with per-site weights. Omitting the last projector keeps the
/// one-magnon states |2..212..2> annihilated.
inline SparseOperator build_perturbation_n3(int L, const PerturbationCoefficients& pc) {
    ModelSpec{3, L, 0.0, {}}.validate();
    BasisIndex basis(L, 3);
    const auto wins = forbidden_window_states_n3();
    if (pc.projector_weights.size() != wins.size())
        throw std::invalid_argument("build_perturbation_n3: weight list does not match projector list");

    std::vector<TripletC> trips;
    for (std::size_t w = 0; w < wins.size(); ++w) {
        if (w + 1 == wins.size() && !pc.include_last_projector) continue;
        Eigen::MatrixXcd proj = wins[w] * wins[w].adjoint();
        detail::accumulate_windows(trips, proj, pc.projector_weights[w], basis, 3);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = true;
    return op;
}

/// Five-site perturbation for the two-parameter coherent manifold (n = 2):
/// projectors onto |00100> and (|00101>-|10100>)/sqrt(2) with per-site weights.
inline SparseOperator build_perturbation_two_param(int L,
                                                   const std::array<std::vector<double>, 2>& weights) {
    ModelSpec{2, L, 0.0, {}}.validate();
    if (L < 6) throw std::invalid_argument("build_perturbation_two_param: need L >= 6");
    BasisIndex basis(L, 2);
    const auto wins = forbidden_window_states_two_param();
    std::vector<TripletC> trips;
    for (std::size_t w = 0; w < wins.size(); ++w) {
        Eigen::MatrixXcd proj = wins[w] * wins[w].adjoint();
        detail::accumulate_windows(trips, proj, weights[w], basis, 5);
    }
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = true;
    return op;
}

/// Uniform-weight sum of window projectors |w><w| over all sites (used for
/// the ETH-violation observable sum_j |010><010|).
inline SparseOperator build_window_projector_sum(int n, int L, const Eigen::VectorXcd& window,
                                                 int width) {
    BasisIndex basis(L, n);
    Eigen::MatrixXcd proj = window * window.adjoint();
    std::vector<double> weights(L, 1.0);
    std::vector<TripletC> trips;
    detail::accumulate_windows(trips, proj, weights, basis, width);
    SparseOperator op;
    op.matrix = detail::from_triplets(basis.dimension(), trips);
    op.hermitian = true;
    return op;
}

// ---------------------------------------------------------------------------
// Full scarred Hamiltonian H_S = H_n + H_pert,n + h Q.
// ---------------------------------------------------------------------------

inline SparseOperator build_h_s(const ModelSpec& spec) {
    spec.validate();
    SparseOperator h = build_h_n(spec.n, spec.L);
    if (spec.n == 2) {
        h.matrix += build_perturbation_n2(spec.L, spec.couplings).matrix;
    } else if (spec.n == 3) {
        h.matrix += build_perturbation_n3(spec.L, spec.couplings).matrix;
    }  // n >= 4: no perturbation catalogue, bare clock chain plus field
    if (spec.h != 0.0) h.matrix += spec.h * build_charge_q(spec.n, spec.L).matrix;
    h.matrix.makeCompressed();
    h.hermitian = true;
    return h;
}

/// True when every active perturbation channel commutes with Q. Only the
/// n = 2 mixing channel c^{(3)} connects different charge sectors; every
/// n = 3 window state is a superposition of equal digit-sum strings, so the
/// rank-1 projectors all conserve the charge.
inline bool conserves_charge(const ModelSpec& spec) {
    if (spec.n == 2) {
        for (double v : spec.couplings.c[2])
            if (v != 0.0) return false;
    }
    return true;
}

}  // namespace clockscar
