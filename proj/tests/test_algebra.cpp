#include <catch2/catch_amalgamated.hpp>

#include <unsupported/Eigen/KroneckerProduct>

#include "clockscar/algebra.hpp"
#include "clockscar/rng.hpp"

using namespace clockscar;

TEST_CASE("local operators match the on-site conventions") {
    SECTION("tau for n=2 is diag(1,-1)") {
        auto t = local_operator(LocalOp::Tau, 2);
        REQUIRE(std::abs(t(0, 0) - Complex(1, 0)) < 1e-15);
        REQUIRE(std::abs(t(1, 1) - Complex(-1, 0)) < 1e-15);
        REQUIRE(std::abs(t(0, 1)) < 1e-15);
    }
    SECTION("s_plus raises the label, S^+|p> = |p+1>") {
        auto sp = local_operator(LocalOp::SPlus, 3);
        Eigen::VectorXcd p0 = Eigen::VectorXcd::Zero(3);
        p0(0) = 1.0;
        Eigen::VectorXcd p1 = sp * p0;
        REQUIRE(std::abs(p1(1) - Complex(1, 0)) < 1e-15);
        Eigen::VectorXcd top = Eigen::VectorXcd::Zero(3);
        top(2) = 1.0;
        REQUIRE((sp * top).norm() < 1e-15);
        REQUIRE(std::abs(sp(1, 0) - Complex(1, 0)) < 1e-15);
        REQUIRE(std::abs(sp(2, 1) - Complex(1, 0)) < 1e-15);
    }
    SECTION("s_z for n=2 is diag(-1/2, +1/2)") {
        auto sz = local_operator(LocalOp::SZ, 2);
        REQUIRE(sz(0, 0).real() == -0.5);
        REQUIRE(sz(1, 1).real() == 0.5);
    }
    SECTION("sigma is the cyclic shift delta_{i,j+1 mod n}") {
        auto s = local_operator(LocalOp::Sigma, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(std::abs(s(i, j) - (i == (j + 1) % 3 ? 1.0 : 0.0)) < 1e-15);
    }
    SECTION("invalid dimension") {
        REQUIRE_THROWS_AS(local_operator(LocalOp::Tau, 1), std::invalid_argument);
        REQUIRE_THROWS_AS(LocalAlgebra::make(0), std::invalid_argument);
    }
}

TEST_CASE("single-site algebra relations hold for n = 2, 3, 4") {
    for (int n : {2, 3, 4}) {
        const auto a = LocalAlgebra::make(n);
        INFO("n = " << n);
        REQUIRE((a.s_z * a.s_plus - a.s_plus * a.s_z - a.s_plus).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((a.s_z * a.s_minus - a.s_minus * a.s_z + a.s_minus).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((a.tau * a.sigma - a.omega * a.sigma * a.tau).cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE((a.s_minus - a.s_plus.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("basis index encodes site 1 as the most significant digit") {
    BasisIndex b(4, 3);
    REQUIRE(b.dimension() == 81);

    SECTION("encode/decode are mutual inverses over the full range") {
        for (std::int64_t i = 0; i < b.dimension(); ++i) {
            auto d = b.decode(i);
            REQUIRE(b.encode(d) == i);
        }
    }
    SECTION("lexicographic order of digit strings equals numeric order") {
        for (std::int64_t i = 0; i + 1 < b.dimension(); ++i) {
            auto lo = b.decode(i), hi = b.decode(i + 1);
            REQUIRE(std::lexicographical_compare(lo.begin(), lo.end(), hi.begin(), hi.end()));
        }
    }
    SECTION("digit accessor agrees with decode") {
        auto d = b.decode(47);
        for (int s = 0; s < 4; ++s) REQUIRE(b.digit(47, s) == d[s]);
    }
}

TEST_CASE("embed places local operators with periodic wrap") {
    const auto alg = LocalAlgebra::make(2);

    SECTION("identity embedding is the identity") {
        auto op = embed(Eigen::MatrixXcd::Identity(2, 2), {3}, 4, 2);
        REQUIRE(op.dimension() == 16);
        SparseMatrixC diff = op.matrix;
        for (int i = 0; i < 16; ++i) diff.coeffRef(i, i) -= 1.0;
        REQUIRE(frobenius_norm(diff) < 1e-15);
    }
    SECTION("single-site s_z on a one-site chain") {
        auto op = embed(local_operator(LocalOp::SZ, 2), {1}, 1, 2);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2);
        v(0) = 1.0;
        Eigen::VectorXcd w = op.matrix * v;
        REQUIRE(std::abs(w(0) - Complex(-0.5, 0.0)) < 1e-15);
    }
    SECTION("two-site raising pair maps |0000> to |0110>") {
        Eigen::MatrixXcd spp = Eigen::kroneckerProduct(alg.s_plus, alg.s_plus);
        auto op = embed(spp, {2, 3}, 4, 2);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
        v(0) = 1.0;
        Eigen::VectorXcd w = op.matrix * v;
        BasisIndex b(4, 2);
        const std::vector<int> target = {0, 1, 1, 0};
        REQUIRE(std::abs(w(b.encode(target)) - Complex(1, 0)) < 1e-15);
        REQUIRE(std::abs(w.norm() - 1.0) < 1e-15);

        // independent oracle: direct Kronecker product over all four sites
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd full =
            Eigen::kroneckerProduct(id, Eigen::kroneckerProduct(alg.s_plus,
                                                                Eigen::kroneckerProduct(alg.s_plus, id)))
                .eval();
        REQUIRE((Eigen::MatrixXcd(op.matrix) - full).cwiseAbs().maxCoeff() < 1e-15);
    }
    SECTION("wrap maps site L+1 to site 1") {
        Eigen::MatrixXcd spp = Eigen::kroneckerProduct(alg.s_plus, alg.s_plus);
        auto wrapped = embed(spp, {4, 5}, 4, 2);
        auto direct = embed(spp, {4, 1}, 4, 2);
        REQUIRE(frobenius_norm(SparseMatrixC(wrapped.matrix - direct.matrix)) < 1e-15);
    }
    SECTION("repeated site after wrap is an error") {
        Eigen::MatrixXcd spp = Eigen::kroneckerProduct(alg.s_plus, alg.s_plus);
        REQUIRE_THROWS_AS(embed(spp, {1, 5}, 4, 2), std::invalid_argument);
    }
    SECTION("dimension mismatch is an error") {
        REQUIRE_THROWS_AS(embed(Eigen::MatrixXcd::Identity(4, 4), {1}, 4, 2),
                          std::invalid_argument);
    }
    SECTION("embedding is linear on random local matrices") {
        RngStream rng(911);
        for (int rep = 0; rep < 5; ++rep) {
            Eigen::MatrixXcd x(4, 4), y(4, 4);
            for (int c = 0; c < 4; ++c)
                for (int r = 0; r < 4; ++r) {
                    x(r, c) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
                    y(r, c) = Complex(rng.uniform_pm1(), rng.uniform_pm1());
                }
            const Complex a(rng.uniform_pm1(), rng.uniform_pm1());
            const Complex b(rng.uniform_pm1(), rng.uniform_pm1());
            auto lhs = embed(Eigen::MatrixXcd(a * x + b * y), {2, 3}, 5, 2);
            SparseMatrixC rhs = a * embed(x, {2, 3}, 5, 2).matrix + b * embed(y, {2, 3}, 5, 2).matrix;
            REQUIRE(frobenius_norm(SparseMatrixC(lhs.matrix - rhs)) /
                        std::max(1.0, frobenius_norm(rhs)) <
                    1e-13);
        }
    }
}

TEST_CASE("charge sectors partition the basis") {
    SECTION("L=2 n=2 q=0 is {|01>, |10>}") {
        auto idx = charge_sector_basis(2, 2, 0.0);
        REQUIRE(idx == std::vector<std::int64_t>{1, 2});
    }
    SECTION("L=4 n=2 q=0 has binom(4,2) = 6 states") {
        REQUIRE(charge_sector_basis(4, 2, 0.0).size() == 6);
    }
    SECTION("L=2 n=3 q=0 is {|02>, |11>, |20>}") {
        auto idx = charge_sector_basis(2, 3, 0.0);
        REQUIRE(idx == std::vector<std::int64_t>{2, 4, 6});
    }
    SECTION("unattainable q gives the empty set") {
        REQUIRE(charge_sector_basis(4, 2, 0.3).empty());
        REQUIRE(charge_sector_basis(4, 2, 100.0).empty());
    }
    SECTION("the union over all charges is the full basis") {
        auto blocks = all_sector_blocks(4, 3);
        std::vector<std::int64_t> all;
        for (const auto& b : blocks) {
            auto direct = charge_sector_basis(4, 3, b.charge);
            REQUIRE(direct == b.indices);
            all.insert(all.end(), b.indices.begin(), b.indices.end());
        }
        std::sort(all.begin(), all.end());
        REQUIRE(all.size() == 81);
        for (std::int64_t i = 0; i < 81; ++i) REQUIRE(all[i] == i);
    }
}

TEST_CASE("sector projectors commute with charge-conserving operators") {
    const int L = 4, n = 2;
    const auto alg = LocalAlgebra::make(n);
    std::vector<SparseMatrixC> ops;
    ops.push_back(embed(alg.tau, {2}, L, n).matrix);
    ops.push_back(embed(alg.s_z, {3}, L, n).matrix);
    ops.push_back(embed(Eigen::MatrixXcd(Eigen::kroneckerProduct(alg.s_plus, alg.s_minus)), {1, 2},
                        L, n)
                      .matrix);
    for (double q : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        auto p = sector_projector(L, n, q);
        for (const auto& op : ops)
            REQUIRE(frobenius_norm(commutator(p.matrix, op)) /
                        std::max(1.0, frobenius_norm(op)) <
                    1e-12);
    }
}

TEST_CASE("hermiticity checks") {
    const auto alg = LocalAlgebra::make(3);
    REQUIRE(is_hermitian(embed(alg.s_z, {1}, 3, 3).matrix));
    REQUIRE_FALSE(is_hermitian(embed(alg.s_plus, {1}, 3, 3).matrix));
}
