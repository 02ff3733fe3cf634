#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "clockscar/dynamics.hpp"
#include "clockscar/eigensolve.hpp"
#include "clockscar/entanglement.hpp"
#include "clockscar/models.hpp"
#include "clockscar/tensornet.hpp"

namespace clockscar {

// ---------------------------------------------------------------------------
// Self-test: the library invariants at small sizes, used by the `verify`
// experiment. Each check records a residual against its tolerance.
// ---------------------------------------------------------------------------

struct VerifyCheck {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed = true;

    void add(const std::string& name, double residual, double tolerance) {
        VerifyCheck c{name, residual, tolerance, residual <= tolerance};
        all_passed = all_passed && c.passed;
        checks.push_back(std::move(c));
    }
};

inline VerifyReport run_verification_suite(std::uint64_t seed) {
    VerifyReport rep;
    RngStream beta_rng(seed, "verify/beta");

    // Single-site algebra.
    for (int n : {2, 3, 4}) {
        const LocalAlgebra a = LocalAlgebra::make(n);
        const Eigen::MatrixXcd comm_p = a.s_z * a.s_plus - a.s_plus * a.s_z - a.s_plus;
        const Eigen::MatrixXcd comm_m = a.s_z * a.s_minus - a.s_minus * a.s_z + a.s_minus;
        rep.add("[S^z,S^+]=+S^+ n=" + std::to_string(n), comm_p.cwiseAbs().maxCoeff(), 1e-14);
        rep.add("[S^z,S^-]=-S^- n=" + std::to_string(n), comm_m.cwiseAbs().maxCoeff(), 1e-14);
        const Eigen::MatrixXcd weyl = a.tau * a.sigma - a.omega * a.sigma * a.tau;
        rep.add("tau sigma = w sigma tau n=" + std::to_string(n), weyl.cwiseAbs().maxCoeff(), 1e-14);
        rep.add("S^- = (S^+)^dag n=" + std::to_string(n),
                (a.s_minus - a.s_plus.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
    }

    // Commutators, Dolan-Grady, duality frame.
    for (int n : {2, 3}) {
        for (int L : {4, 6}) {
            const auto hn = build_h_n(n, L);
            const auto q = build_charge_q(n, L);
            const auto qh = build_charge_q_hat(n, L);
            const auto qp = build_q_plus(n, L);
            const std::string tag = " n=" + std::to_string(n) + " L=" + std::to_string(L);
            rep.add("H_n hermitian" + tag, is_hermitian(hn.matrix) ? 0.0 : 1.0, 0.5);
            rep.add("[Q,H_n]=0" + tag, scaled_commutator_norm(q.matrix, hn.matrix), 1e-10);
            rep.add("[Qhat,H_n]=0" + tag, scaled_commutator_norm(qh.matrix, hn.matrix), 1e-10);
            rep.add("[Q+,H_n]=0" + tag, scaled_commutator_norm(qp.matrix, hn.matrix), 1e-10);

            const SparseMatrixC qqh = commutator(q.matrix, qh.matrix);
            const double ref = frobenius_norm(qqh);
            const SparseMatrixC dg1 =
                commutator(q.matrix, SparseMatrixC(commutator(q.matrix, qqh))) -
                SparseMatrixC(double(n * n) * qqh);
            const SparseMatrixC qhq = commutator(qh.matrix, q.matrix);
            const SparseMatrixC dg2 =
                commutator(qh.matrix, SparseMatrixC(commutator(qh.matrix, qhq))) -
                SparseMatrixC(double(n * n) * qhq);
            rep.add("Dolan-Grady Q side" + tag, frobenius_norm(dg1) / ref, 1e-9);
            rep.add("Dolan-Grady Qhat side" + tag, frobenius_norm(dg2) / ref, 1e-9);

            const auto ho = build_h_orig(n, L);
            const auto u = frame_unitary(n, L);
            const SparseMatrixC rotated =
                SparseMatrixC(u.matrix * ho.matrix) * SparseMatrixC(u.matrix.adjoint());
            rep.add("U H_orig U^-1 = H_n" + tag,
                    frobenius_norm(SparseMatrixC(rotated - hn.matrix)) /
                        std::max(1.0, frobenius_norm(hn.matrix)),
                    1e-10);
        }
    }

    // Spectral equivalence of the two frames.
    {
        const auto evn = diagonalize(build_h_n(2, 6), 2, 6, {{}, false}).eigenvalues;
        const auto evo = diagonalize(build_h_orig(2, 6), 2, 6, {{}, false}).eigenvalues;
        rep.add("spec(H_orig) = spec(H_n) n=2 L=6", (evn - evo).cwiseAbs().maxCoeff(), 1e-9);
    }

    // Coherent state: MPS / MPO / series triple agreement and symmetry.
    for (int n : {2, 3}) {
        for (int L : {4, 6}) {
            for (int rep_i = 0; rep_i < 2; ++rep_i) {
                const Complex beta(beta_rng.uniform_pm1(), 0.4 * beta_rng.uniform_pm1());
                const auto mps = coherent_state(n, L, beta);
                const auto ser = coherent_state_series(n, L, beta);
                Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(mps.size());
                vac(0) = 1.0;
                const auto mpo = apply_mpo(coherent_mpo_tensors(n, beta, L), vac);
                const std::string tag =
                    " n=" + std::to_string(n) + " L=" + std::to_string(L) + " #" + std::to_string(rep_i);
                rep.add("coherent MPS = series" + tag, (mps - ser).cwiseAbs().maxCoeff(), 1e-11);
                rep.add("coherent MPO = series" + tag, (mpo - ser).cwiseAbs().maxCoeff(), 1e-11);
                const Complex rot = beta * omega_root(n);
                rep.add("psi(w beta) = psi(beta)" + tag,
                        (coherent_state(n, L, rot) - mps).cwiseAbs().maxCoeff(), 1e-13);
            }
        }
    }

    // Norm identity of the coherent state.
    {
        const int n = 2, L = 6;
        const Complex beta(0.57, 0.21);
        const auto psi = coherent_state(n, L, beta);
        double expect = 0.0;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(psi.size());
        v(0) = 1.0;
        const auto qp = build_q_plus(n, L);
        double fact = 1.0;
        for (int k = 0;; ++k) {
            if (k > 0) {
                v = (qp.matrix * v).eval();
                fact *= k;
                if (v.norm() == 0.0) break;
            }
            expect += std::pow(std::abs(beta), 2.0 * n * k) * v.squaredNorm() / (fact * fact);
            if (k > L) break;
        }
        rep.add("coherent norm identity n=2 L=6", std::abs(psi.squaredNorm() - expect), 1e-11);
    }

    // Perturbations annihilate the coherent manifold.
    for (int L : {6}) {
        const auto pc = PerturbationCoefficients::random_n2(L, sub_seed(seed, "verify/n2"));
        const auto hp = build_perturbation_n2(L, pc);
        for (Complex beta : {Complex(0.3, 0.0), Complex(0.7, 0.2), Complex(-0.45, 0.6)}) {
            const auto psi = coherent_state(2, L, beta);
            rep.add("H_pert,2 psi(beta)=0 L=" + std::to_string(L),
                    (hp.matrix * psi).cwiseAbs().maxCoeff() / psi.norm(), 1e-11);
        }
    }
    for (bool last : {false, true}) {
        const int L = 4;
        const auto pc = PerturbationCoefficients::random_n3(L, sub_seed(seed, "verify/n3"), last);
        const auto hp = build_perturbation_n3(L, pc);
        for (Complex beta : {Complex(0.5, 0.0), Complex(0.2, 0.65)}) {
            const auto psi = coherent_state(3, L, beta);
            rep.add(std::string("H_pert,3 psi(beta)=0 last=") + (last ? "on" : "off"),
                    (hp.matrix * psi).cwiseAbs().maxCoeff() / psi.norm(), 1e-11);
        }
    }

    // Scar tower eigenstates with the equally spaced Zeeman ladder.
    {
        const int n = 2, L = 6;
        const double h = 0.9;
        ModelSpec spec{n, L, h, PerturbationCoefficients::random_n2(L, sub_seed(seed, "verify/hs"))};
        const auto hs = build_h_s(spec);
        const double efm = ferromagnetic_energy(n, L);
        double worst = 0.0;
        for (const auto& ts : scar_tower_family(n, L)) {
            const double expect = efm + h * (n * ts.k - 0.5 * L * (n - 1));
            worst = std::max(worst, (hs.matrix * ts.state - expect * ts.state).norm());
        }
        rep.add("scar tower ladder n=2 L=6", worst, 1e-10);
    }

    // Two-parameter family: MPO vs iterated dense exponentials, forbidden windows.
    {
        const int L = 6;
        const Complex alpha(0.5, 0.0), beta(0.4, 0.0);
        const auto mpo = two_param_state(alpha, beta, L);
        const auto dense = multi_param_state_series({{1, alpha}, {2, beta}}, L);
        rep.add("two-param MPO = dense L=6", (mpo - dense).cwiseAbs().maxCoeff(), 1e-11);

        const auto wins = forbidden_window_states_two_param();
        const auto psi = two_param_state(Complex(0.3, 0.1), Complex(0.8, -0.2), 8);
        double worst = 0.0;
        for (const auto& w : wins) {
            for (int j = 1; j <= 8; ++j) {
                Eigen::MatrixXcd proj = w * w.adjoint();
                std::vector<TripletC> trips;
                const int sites[5] = {j, j + 1, j + 2, j + 3, j + 4};
                BasisIndex basis(8, 2);
                detail::accumulate_embedded(trips, proj, sites, basis);
                SparseMatrixC p = detail::from_triplets(basis.dimension(), trips);
                worst = std::max(worst, (p * psi).norm() / psi.norm());
            }
        }
        rep.add("two-param forbidden windows L=8", worst, 1e-12);
    }

    // Entanglement: Schmidt sum rule and the two entropy routes.
    {
        RngStream rng(seed, "verify/states");
        double worst_sum = 0.0, worst_diff = 0.0;
        for (int rep_i = 0; rep_i < 3; ++rep_i) {
            const auto state = haar_random_state(ipow(2, 8), rng);
            const auto sd = schmidt_decompose(state, 2, 8, 4);
            worst_sum = std::max(worst_sum, std::abs(sd.values.squaredNorm() - 1.0));
            worst_diff = std::max(worst_diff, std::abs(von_neumann_ee(state, 2, 8, 4) -
                                                       reduced_density_entropy(state, 2, 8, 4)));
        }
        rep.add("Schmidt values sum to 1", worst_sum, 1e-12);
        rep.add("EE schmidt route = rho route", worst_diff, 1e-10);
    }

    // Closed-form tower entropy against the dense open-boundary route.
    for (int L : {4, 8}) {
        const auto cf = scar_ee_closed_form(L);
        rep.add("closed-form EE = numerical OBC L=" + std::to_string(L),
                std::abs(cf.entropy - scar_ee_numerical_obc(L, L / 4)), 1e-10);
        rep.add("Vandermonde normalization L=" + std::to_string(L),
                cf.normalization == big_binomial(3 * L / 4, L / 4) ? 0.0 : 1.0, 0.5);
    }

    // Sector machinery: blocks partition and sector spectra match.
    {
        const int n = 2, L = 6;
        auto blocks = all_sector_blocks(L, n);
        std::int64_t total = 0;
        for (const auto& b : blocks) total += static_cast<std::int64_t>(b.indices.size());
        rep.add("sector blocks partition basis", total == ipow(n, L) ? 0.0 : 1.0, 0.5);

        ModelSpec spec{n, L, 0.7,
                       PerturbationCoefficients::random_n2(L, sub_seed(seed, "verify/sector"),
                                                           {true, true, false})};
        const auto hs = build_h_s(spec);
        const auto full = diagonalize(hs, n, L, {{}, false}).eigenvalues;
        std::vector<double> merged;
        for (const auto& b : blocks) {
            if (b.indices.empty()) continue;
            const auto ev = diagonalize(hs, n, L, {b.charge, false}).eigenvalues;
            for (Eigen::Index i = 0; i < ev.size(); ++i) merged.push_back(ev(i));
        }
        std::sort(merged.begin(), merged.end());
        double worst = 0.0;
        for (Eigen::Index i = 0; i < full.size(); ++i)
            worst = std::max(worst, std::abs(full(i) - merged[i]));
        rep.add("sector spectra = full spectrum", worst, 1e-9);
    }

    // One-magnon block (n = 3).
    {
        const int L = 6;
        const auto pc = PerturbationCoefficients::random_n3(L, sub_seed(seed, "verify/magnon"), false);
        const auto hp = build_perturbation_n3(L, pc);
        double worst = 0.0;
        for (const auto& m : one_magnon_family(L))
            worst = std::max(worst, (hp.matrix * m).norm());
        rep.add("one-magnon annihilated (last off)", worst, 1e-12);
        rep.add("one-magnon EE = ln2 (k=pi)",
                std::abs(von_neumann_ee(one_magnon_state(L, L / 2), 3, L, L / 2) - std::log(2.0)),
                1e-12);
    }

    // Dynamics: conservation laws and the coherent rotation.
    {
        const int n = 2, L = 6;
        const double h = 1.0;
        ModelSpec spec{n, L, h, PerturbationCoefficients::random_n2(L, sub_seed(seed, "verify/dyn"))};
        const auto hs = build_h_s(spec);
        const auto dec = diagonalize(hs, n, L, {});
        RngStream rng(seed, "verify/dynstate");
        const auto psi0 = haar_random_state(ipow(n, L), rng);
        double worst_norm = 0.0, worst_energy = 0.0;
        const double e0 = observable_expectation(psi0, hs);
        for (double t : {0.37, 1.9, 4.4}) {
            const auto psit = evolve(psi0, dec, t);
            worst_norm = std::max(worst_norm, std::abs(psit.norm() - 1.0));
            worst_energy = std::max(worst_energy, std::abs(observable_expectation(psit, hs) - e0) /
                                                      std::max(1.0, std::abs(e0)));
        }
        rep.add("evolution preserves norm", worst_norm, 1e-12);
        rep.add("evolution preserves energy", worst_energy, 1e-10);

        const Complex beta(0.5, 0.0);
        const auto coh = coherent_state(n, L, beta).normalized();
        double worst_rot = 0.0;
        for (double t : {0.3, 1.1}) {
            const Eigen::VectorXcd lhs = evolve(coh, dec, t);
            const Eigen::VectorXcd rhs =
                coherent_state(n, L, beta * std::exp(Complex(0.0, -h * t))).normalized();
            const Complex ov = (lhs.adjoint() * rhs).value();
            worst_rot = std::max(worst_rot, std::abs(std::abs(ov) - 1.0));
        }
        rep.add("coherent evolution = rotated beta", worst_rot, 1e-10);
    }

    // Level statistics calibration.
    {
        Eigen::VectorXd ladder(201);
        for (int i = 0; i <= 200; ++i) ladder(i) = 0.25 * i;
        const auto st = level_spacing_stats(ladder);
        rep.add("equally spaced spectrum mean_r = 1", std::abs(st.mean_r - 1.0), 1e-12);

        const auto pois = level_spacing_stats(synthetic_poisson_levels(200000, seed));
        rep.add("Poisson surrogate mean_r", std::abs(pois.mean_r - 0.386), 0.01);

        double racc = 0.0;
        std::size_t rcount = 0;
        for (int draw = 0; draw < 3; ++draw) {
            const auto st =
                level_spacing_stats(goe_levels(1500, sub_seed(seed, "goe/" + std::to_string(draw))));
            for (double r : st.r_values) racc += r;
            rcount += st.r_values.size();
        }
        rep.add("GOE surrogate mean_r", std::abs(racc / rcount - 0.53), 0.02);

        for (auto kind : {ReferenceDistribution::Poisson, ReferenceDistribution::WignerDyson}) {
            double integral = 0.0;  // trapezoid on [0, 40], step 1e-3
            const double dx = 1e-3;
            for (int i = 0; i <= 40000; ++i) {
                const double w = (i == 0 || i == 40000) ? 0.5 : 1.0;
                integral += w * dx * reference_pdf(kind, i * dx);
            }
            rep.add(kind == ReferenceDistribution::Poisson ? "Poisson pdf normalized"
                                                           : "Wigner-Dyson pdf normalized",
                    std::abs(integral - 1.0), 1e-8);
        }
    }

    return rep;
}

}  // namespace clockscar
