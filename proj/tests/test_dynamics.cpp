#include <catch2/catch_amalgamated.hpp>

#include "clockscar/dynamics.hpp"
#include "clockscar/models.hpp"
#include "clockscar/tensornet.hpp"

using namespace clockscar;

namespace {

struct Setup {
    ModelSpec spec;
    SparseOperator hs;
    EigenDecomposition dec;
};

Setup make_setup(int n, int L, double h, std::uint64_t seed, bool all_channels = true) {
    Setup s;
    s.spec = ModelSpec{n, L, h,
                       n == 2 ? PerturbationCoefficients::random_n2(
                                    L, seed, {true, true, all_channels})
                              : PerturbationCoefficients::random_n3(L, seed, false)};
    s.hs = build_h_s(s.spec);
    s.dec = diagonalize(s.hs, n, L, {});
    return s;
}

}  // namespace

TEST_CASE("evolution basics") {
    auto s = make_setup(2, 6, 1.0, 314u);
    RngStream rng(1);
    const auto psi = haar_random_state(64, rng);

    SECTION("t = 0 is the identity") {
        REQUIRE((evolve(psi, s.dec, 0.0) - psi).norm() < 1e-12);
    }
    SECTION("an eigenstate only picks up a phase") {
        const auto v = s.dec.eigenvector_full(10);
        const auto w = evolve(v, s.dec, 2.7);
        const Complex ov = (v.adjoint() * w).value();
        REQUIRE(std::abs(std::abs(ov) - 1.0) < 1e-12);
    }
    SECTION("norm and energy are conserved") {
        const double e0 = observable_expectation(psi, s.hs);
        for (double t : {0.1, 1.7, 5.3}) {
            const auto w = evolve(psi, s.dec, t);
            REQUIRE(std::abs(w.norm() - 1.0) < 1e-12);
            REQUIRE(std::abs(observable_expectation(w, s.hs) - e0) / std::abs(e0) < 1e-10);
        }
    }
    SECTION("missing eigenvectors is an error") {
        auto dec = diagonalize(s.hs, 2, 6, {{}, false});
        REQUIRE_THROWS_AS(evolve(psi, dec, 1.0), std::runtime_error);
    }
}

TEST_CASE("coherent state rotates in beta under evolution") {
    auto s = make_setup(2, 8, 1.0, 2718u);
    const Complex beta(0.5, 0.0);
    const auto coh = coherent_state(2, 8, beta).normalized();
    for (double t : {0.3, 1.1}) {
        const Eigen::VectorXcd lhs = evolve(coh, s.dec, t);
        const Eigen::VectorXcd rhs =
            coherent_state(2, 8, beta * std::exp(Complex(0.0, -s.spec.h * t))).normalized();
        const Complex ov = (lhs.adjoint() * rhs).value();
        REQUIRE(std::abs(std::abs(ov) - 1.0) < 1e-10);
    }
}

TEST_CASE("fidelity traces") {
    auto s = make_setup(2, 6, 1.0, 11u);
    const auto coh = coherent_state(2, 6, Complex(0.5, 0.0)).normalized();

    SECTION("F(0) = 1 and F stays in [0, 1]") {
        auto tr = fidelity_trace(coh, s.dec, default_time_grid(M_PI, 5, 101));
        REQUIRE(tr.fidelity.front() == Catch::Approx(1.0).margin(1e-12));
        for (double f : tr.fidelity) {
            REQUIRE(f >= 0.0);
            REQUIRE(f <= 1.0 + 1e-12);
        }
    }
    SECTION("perfect revivals at multiples of T = 2 pi / (n h)") {
        const double period = revival_period(2, 1.0);
        REQUIRE(period == Catch::Approx(M_PI).epsilon(1e-15));
        std::vector<double> revivals;
        for (int k = 1; k <= 5; ++k) revivals.push_back(k * period);
        auto tr = fidelity_trace(coh, s.dec, revivals);
        for (double f : tr.fidelity) REQUIRE(f >= 1.0 - 1e-8);
    }
    SECTION("n=3 revival period 2 pi / 4.5") {
        auto s3 = make_setup(3, 4, 1.5, 5u);
        const double period = revival_period(3, 1.5);
        REQUIRE(period == Catch::Approx(2.0 * M_PI / 4.5).epsilon(1e-15));
        const auto coh3 = coherent_state(3, 4, Complex(0.4, 0.0)).normalized();
        auto tr = fidelity_trace(coh3, s3.dec, {period, 2 * period, 3 * period});
        for (double f : tr.fidelity) REQUIRE(f >= 1.0 - 1e-8);
    }
    SECTION("fidelity is periodic along the whole grid") {
        const double period = revival_period(2, 1.0);
        auto grid = default_time_grid(period, 1, 40);
        auto base = fidelity_trace(coh, s.dec, grid);
        for (double& t : grid) t += period;
        auto shifted = fidelity_trace(coh, s.dec, grid);
        for (std::size_t i = 0; i < grid.size(); ++i)
            REQUIRE(std::abs(base.fidelity[i] - shifted.fidelity[i]) < 1e-8);
    }
    SECTION("tower initial states have F = 1 identically") {
        for (const auto& ts : scar_tower_family(2, 6)) {
            auto tr = fidelity_trace(ts.state, s.dec, {0.7, 2.9, 8.1});
            for (double f : tr.fidelity) REQUIRE(f >= 1.0 - 1e-10);
        }
    }
}

TEST_CASE("entropy traces") {
    SECTION("coherent initial state keeps constant entropy") {
        auto s = make_setup(2, 8, 1.0, 12345u);
        const auto coh = coherent_state(2, 8, Complex(0.5, 0.0)).normalized();
        auto tr = ee_trace(coh, s.dec, default_time_grid(M_PI, 2, 25), 4, 2, 8);
        const double s0 = tr.entropy.front();
        for (double v : tr.entropy) REQUIRE(std::abs(v - s0) < 1e-9);
    }
    SECTION("a product eigenstate of a diagonal Hamiltonian stays at zero") {
        // zero couplings, h != 0: H_S for n=2 reduces to H_2 + h Q; use the
        // all-up basis state which is an eigenstate of both
        ModelSpec spec{2, 4, 1.3, PerturbationCoefficients::zero(2, 4)};
        auto hs = build_h_s(spec);
        auto dec = diagonalize(hs, 2, 4, {});
        BasisIndex b(4, 2);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
        v(b.encode(std::vector<int>{1, 1, 1, 1})) = 1.0;
        auto tr = ee_trace(v, dec, {0.0, 0.9, 3.3}, 2, 2, 4);
        for (double x : tr.entropy) REQUIRE(x < 1e-10);
    }
    SECTION("generic initial states thermalize toward the Page value") {
        auto s = make_setup(2, 8, 1.0, 999u);
        RngStream rng(17);
        const auto rnd = haar_random_state(256, rng);
        auto tr = ee_trace(rnd, s.dec, default_time_grid(M_PI, 5, 60), 4, 2, 8);
        const double page = page_value(8, 2);
        for (double v : tr.entropy) REQUIRE(std::abs(v - page) / page < 0.25);
    }
}
