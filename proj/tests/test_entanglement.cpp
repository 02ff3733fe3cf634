#include <catch2/catch_amalgamated.hpp>

#include "clockscar/dynamics.hpp"
#include "clockscar/entanglement.hpp"
#include "clockscar/models.hpp"
#include "clockscar/tensornet.hpp"

using namespace clockscar;

TEST_CASE("von Neumann entropy basics") {
    SECTION("product state has zero entropy") {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
        v(5) = 1.0;
        REQUIRE(von_neumann_ee(v, 2, 4, 2) < 1e-14);
    }
    SECTION("Bell pair has entropy ln 2") {
        Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
        bell(1) = bell(2) = 1.0 / std::sqrt(2.0);
        REQUIRE(von_neumann_ee(bell, 2, 2, 1) == Catch::Approx(std::log(2.0)).margin(1e-12));
    }
    SECTION("alternating one-magnon state at n=3, L=8 has entropy ln 2") {
        // momentum pi combination; each magnon position is a product across
        // the half cut, so the Schmidt weights are exactly (1/2, 1/2)
        const auto v = one_magnon_state(8, 4);
        REQUIRE(von_neumann_ee(v, 3, 8, 4) == Catch::Approx(std::log(2.0)).margin(1e-6));
        // brute-force oracle through the reduced density matrix
        REQUIRE(reduced_density_entropy(v, 3, 8, 4) ==
                Catch::Approx(std::log(2.0)).margin(1e-10));
    }
    SECTION("entropy is cut-convention consistent with Schmidt route") {
        RngStream rng(404);
        for (int rep = 0; rep < 4; ++rep) {
            const auto state = haar_random_state(ipow(2, 8), rng);
            for (int cut : {2, 4, 5}) {
                const double a = von_neumann_ee(state, 2, 8, cut);
                const double b = reduced_density_entropy(state, 2, 8, cut);
                REQUIRE(a == Catch::Approx(b).margin(1e-10));
            }
        }
    }
    SECTION("coherent-state entropy is invariant under global phase and beta rotation") {
        const int n = 3, L = 4;
        const Complex beta(0.5, 0.3);
        const auto psi = coherent_state(n, L, beta).normalized();
        const double s0 = von_neumann_ee(psi, n, L, 2);
        const auto rot = coherent_state(n, L, beta * omega_root(n)).normalized();
        REQUIRE(von_neumann_ee(rot, n, L, 2) == Catch::Approx(s0).margin(1e-13));
        const Eigen::VectorXcd phased = std::exp(Complex(0.0, 1.234)) * psi;
        REQUIRE(von_neumann_ee(phased, n, L, 2) == Catch::Approx(s0).margin(1e-13));
    }
}

TEST_CASE("page values") {
    REQUIRE(page_value(10, 2) == Catch::Approx(5.0 * std::log(2.0) - 0.5).epsilon(1e-15));
    REQUIRE(page_value(6, 3) == Catch::Approx(3.0 * std::log(3.0) - 0.5).epsilon(1e-15));
    REQUIRE(page_value(2, 2) == Catch::Approx(std::log(2.0) - 0.5).epsilon(1e-15));
}

TEST_CASE("scar identification by overlap") {
    const int n = 2, L = 6;
    ModelSpec spec{n, L, 1.0, PerturbationCoefficients::random_n2(L, 31u)};
    auto hs = build_h_s(spec);
    auto dec = diagonalize(hs, n, L, {});

    SECTION("an exact eigenstate matches with overlap 1") {
        const auto v = dec.eigenvector_full(7);
        auto m = identify_scar(dec, v);
        REQUIRE(m.matched);
        REQUIRE(m.overlap == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(m.best_index == 7);
    }
    SECTION("tower states match at >= 0.999") {
        for (const auto& ts : scar_tower_family(n, L)) {
            auto m = identify_scar(dec, ts.state);
            REQUIRE(m.matched);
            REQUIRE(m.overlap > 0.999);
        }
    }
    SECTION("a random state is unmatched") {
        RngStream rng(8);
        auto m = identify_scar(dec, haar_random_state(ipow(n, L), rng));
        REQUIRE_FALSE(m.matched);
    }
}

TEST_CASE("scatter points carry tower tags with bounded entropy") {
    const int n = 2, L = 8;
    ModelSpec spec{n, L, 1.0, PerturbationCoefficients::random_n2(L, 1234u)};
    auto hs = build_h_s(spec);
    auto dec = diagonalize(hs, n, L, {});
    auto points = ee_scatter(dec, n, L, L / 2);

    std::vector<std::pair<ScarTag, Eigen::VectorXcd>> candidates;
    for (const auto& ts : scar_tower_family(n, L))
        candidates.push_back({ScarTag{ScarTag::Kind::Tower, ts.k}, ts.state});
    auto matches = tag_scar_points(points, dec, candidates);

    const double bound = std::log(0.5 * L + 1.0) + std::log(2.0);
    int tagged = 0;
    for (const auto& p : points) {
        if (p.tag.kind != ScarTag::Kind::Tower) continue;
        ++tagged;
        REQUIRE(p.entropy <= bound);
        REQUIRE(p.overlap_with_tag > 0.99);
    }
    REQUIRE(tagged == static_cast<int>(candidates.size()));
    for (const auto& m : matches) REQUIRE(m.matched);
}

TEST_CASE("degenerate tower at h=0 is matched as a cluster") {
    const int n = 2, L = 6;
    ModelSpec spec{n, L, 0.0, PerturbationCoefficients::random_n2(L, 77u)};
    auto dec = diagonalize(build_h_s(spec), n, L, {});
    const auto fam = scar_tower_family(n, L);
    auto points = ee_scatter(dec, n, L, L / 2);
    std::vector<std::pair<ScarTag, Eigen::VectorXcd>> candidates;
    for (const auto& ts : fam) candidates.push_back({ScarTag{ScarTag::Kind::Tower, ts.k}, ts.state});
    auto matches = tag_scar_points(points, dec, candidates);
    for (const auto& m : matches) {
        REQUIRE(m.matched);
        REQUIRE(std::abs(m.energy - ferromagnetic_energy(n, L)) < 1e-9);
    }
}

TEST_CASE("ETH-violating observable expectations") {
    const int n = 2, L = 8;
    const auto alg = LocalAlgebra::make(2);
    const auto obs = build_window_projector_sum(2, L, forbidden_window_states_n2()[0], 3);

    SECTION("vacuum expectation vanishes") {
        Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(ipow(2, L));
        vac(0) = 1.0;
        REQUIRE(observable_expectation(vac, obs) < 1e-15);
    }
    SECTION("|0101...> counts its 010 windows, one per up spin") {
        BasisIndex b(L, 2);
        std::vector<int> digits(L);
        for (int j = 0; j < L; ++j) digits[j] = j % 2;  // 0101...
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(b.dimension());
        v(b.encode(digits)) = 1.0;
        REQUIRE(observable_expectation(v, obs) == Catch::Approx(L / 2.0).margin(1e-12));
    }
    SECTION("scar-tagged eigenstates have zero expectation, bulk does not") {
        ModelSpec spec{n, L, 1.0, PerturbationCoefficients::random_n2(L, 2u)};
        auto dec = diagonalize(build_h_s(spec), n, L, {});
        const auto values = observable_expectation(dec, obs);
        std::vector<std::pair<ScarTag, Eigen::VectorXcd>> candidates;
        for (const auto& ts : scar_tower_family(n, L))
            candidates.push_back({ScarTag{ScarTag::Kind::Tower, ts.k}, ts.state});
        auto points = ee_scatter(dec, n, L, L / 2);
        auto matches = tag_scar_points(points, dec, candidates);
        double scar_max = 0.0;
        for (const auto& m : matches) {
            REQUIRE(m.matched);
            scar_max = std::max(scar_max, std::abs(values(m.best_index)));
        }
        REQUIRE(scar_max < 1e-9);
        // mid-spectrum non-scar minimum well separated from zero
        double bulk_min = 1e300;
        for (Eigen::Index i = dec.size() / 4; i < 3 * dec.size() / 4; ++i) {
            if (points[i].tag.kind != ScarTag::Kind::None) continue;
            bulk_min = std::min(bulk_min, values(i));
        }
        REQUIRE(bulk_min > 10.0 * std::max(scar_max, 1e-12));
    }
}

TEST_CASE("closed-form tower entropy") {
    SECTION("L=4 is the maximally mixed three-level case") {
        auto cf = scar_ee_closed_form(4);
        REQUIRE(cf.coefficients == std::vector<BigInt>{1, 1, 1});
        REQUIRE(cf.normalization == 3);
        REQUIRE(cf.entropy == Catch::Approx(std::log(3.0)).margin(1e-14));
        REQUIRE(cf.bound == Catch::Approx(std::log(3.0)).margin(1e-14));
    }
    SECTION("normalization is binom(3L/4, L/4) up to L=64") {
        for (int L = 4; L <= 64; L += 4) {
            auto cf = scar_ee_closed_form(L);
            REQUIRE(cf.normalization == big_binomial(3 * L / 4, L / 4));
        }
    }
    SECTION("entropy respects the Gibbs bound up to L=64") {
        for (int L = 4; L <= 64; L += 4) {
            auto cf = scar_ee_closed_form(L);
            REQUIRE(cf.entropy <= cf.bound + 1e-12);
        }
    }
    SECTION("closed form equals the numerical open-boundary entropy") {
        for (int L : {4, 8, 12}) {
            REQUIRE(scar_ee_closed_form(L).entropy ==
                    Catch::Approx(scar_ee_numerical_obc(L, L / 4)).margin(1e-10));
        }
    }
    SECTION("k = 0 has zero entropy") { REQUIRE(scar_ee_numerical_obc(8, 0) == 0.0); }
    SECTION("L must be a multiple of 4") {
        REQUIRE_THROWS_AS(scar_ee_closed_form(6), std::invalid_argument);
    }
}

TEST_CASE("transfer-matrix powers reproduce the parity-split binomials") {
    const int k = 8;
    const int d = 2 * k + 1;
    auto f = tower_mps_obc(2, k);  // only need the M tensors' dimensions
    Eigen::MatrixXd m0 = Eigen::MatrixXd::Zero(d, d), m1 = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (i % 2 == 0) m0(i, i) = 1.0;
        if (i + 1 < d) m1(i, i + 1) = 1.0;
    }
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d * d, d * d);
    for (const auto& m : {m0, m1})
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (int c = 0; c < d; ++c)
                    for (int dd = 0; dd < d; ++dd)
                        e(a * d + c, b * d + dd) += m(a, b) * m(c, dd);
    Eigen::MatrixXd ep = Eigen::MatrixXd::Identity(d * d, d * d);
    for (int power = 1; power <= 6; ++power) {
        ep = (ep * e).eval();
        for (int l = 0; l <= 4; ++l) {
            const double got = ep(0 * d + 0, l * d + l);
            double expect;
            if (l % 2 == 0)
                expect = (power - l / 2 >= l / 2) ? big_binomial(power - l / 2, l / 2).convert_to<double>()
                                                  : 0.0;
            else
                expect = (power - (l + 1) / 2 >= (l - 1) / 2)
                             ? big_binomial(power - (l + 1) / 2, (l - 1) / 2).convert_to<double>()
                             : 0.0;
            INFO("power=" << power << " l=" << l);
            REQUIRE(got == Catch::Approx(expect).margin(1e-9));
        }
    }
}

TEST_CASE("one-magnon candidates under the projector switch") {
    const int n = 3, L = 6;
    const double h = 1.5;

    SECTION("without the last projector the momentum states are exact eigenstates") {
        ModelSpec spec{n, L, h, PerturbationCoefficients::random_n3(L, 11u, false)};
        auto hs = build_h_s(spec);
        auto dec = diagonalize(hs, n, L, {});
        for (int m = 0; m < L; ++m) {
            const auto v = one_magnon_state(L, m);
            const double e = observable_expectation(v, hs);
            REQUIRE((hs.matrix * v - e * v).norm() < 1e-10);
            auto match = identify_scar(dec, v);
            REQUIRE(match.matched);
        }
    }
    SECTION("with the last projector the candidates go unmatched") {
        ModelSpec spec{n, L, h, PerturbationCoefficients::random_n3(L, 11u, true)};
        auto dec = diagonalize(build_h_s(spec), n, L, {});
        int unmatched = 0;
        for (int m = 0; m < L; ++m)
            if (!identify_scar(dec, one_magnon_state(L, m)).matched) ++unmatched;
        REQUIRE(unmatched == L);
    }
}
