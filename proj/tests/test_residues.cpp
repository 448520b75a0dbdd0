#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "suq2/residues.hpp"

using namespace suq2;

namespace {

DiskElement dmono(int k, int m, cplx c = 1.0) { return DiskElement::monomial({k, m}, c); }

// Independent oracle: residues and z=0 value of the spectral zeta function of
// |D| via its Hurwitz decomposition
//   zeta_D(z) = zeta(z-2,3/2) + zeta(z-2,1/2) - 1/4 zeta(z,3/2) - 1/4 zeta(z,1/2).
struct ZetaDOracle {
    double res3 = 2.0;   // zeta(z-2, a) contributes residue 1 at z = 3, twice
    double res2 = 0.0;   // no pole at z = 2
    double res1 = -0.5;  // -1/4 - 1/4 from the zeta(z, a) pieces
    double at0() const {
        return hurwitz_zeta(-2.0, 1.5) + hurwitz_zeta(-2.0, 0.5) - 0.25 * hurwitz_zeta(0.0, 1.5) -
               0.25 * hurwitz_zeta(0.0, 0.5);
    }
};

}  // namespace

TEST_CASE("disk representations") {
    const double q = 0.5;
    SECTION("printed entries") {
        auto bp = disk_rep(DiskSide::plus, dmono(0, 1), 4, q);
        CHECK(std::abs(Eigen::MatrixXcd(bp)(0, 0) - cplx(1.0)) < 1e-15);
        auto bm = disk_rep(DiskSide::minus, dmono(0, 1), 4, q);
        CHECK(std::abs(Eigen::MatrixXcd(bm)(2, 2) - cplx(-0.25)) < 1e-15);
    }
    SECTION("disk relations hold as matrices") {
        for (DiskSide side : {DiskSide::plus, DiskSide::minus}) {
            int N = 30;
            Eigen::MatrixXcd A = disk_rep(side, dmono(1, 0), N, q);
            Eigen::MatrixXcd As = disk_rep(side, dmono(-1, 0), N, q);
            Eigen::MatrixXcd B = disk_rep(side, dmono(0, 1), N, q);
            Eigen::MatrixXcd lhs = As * A + q * q * B * B;
            for (int col = 0; col < N; ++col)  // last column feels the cut
                for (int row = 0; row < N; ++row) {
                    cplx expect = row == col ? 1.0 : 0.0;
                    CHECK(std::abs(lhs(row, col) - expect) < 1e-14);
                }
        }
    }
    SECTION("monomial amplitudes annihilate the vacuum") {
        auto [t, amp] = disk_mono_amp({-1, 0}, 0, DiskSide::plus, q);
        CHECK(amp == 0.0);
    }
}

TEST_CASE("closed-form tau functionals") {
    const double q = 0.5;
    SECTION("basic equalities") {
        TauValue one = tau_closed(DiskElement::one(), DiskSide::plus, q);
        CHECK(one.tau1 == cplx(1.0));
        CHECK(one.tau0_up == cplx(-0.5));
        CHECK(one.tau0_dn == cplx(0.5));
        for (int n = 1; n <= 4; ++n) {
            TauValue bp = tau_closed(dmono(0, n), DiskSide::plus, q);
            TauValue bm = tau_closed(dmono(0, n), DiskSide::minus, q);
            CHECK(bp.tau1 == cplx(0.0));
            double expect = 1.0 / (1.0 - std::pow(q, n));
            CHECK(std::abs(bp.tau0_up - cplx(expect)) < 1e-15);
            CHECK(std::abs(bp.tau0_dn - cplx(expect)) < 1e-15);
            double sign = n % 2 == 1 ? -1.0 : 1.0;
            CHECK(std::abs(bm.tau0_up - cplx(sign * expect)) < 1e-15);
        }
        // tau_0^up(r_-(b)^2) = 1/(1-q^2) = 4/3 at q = 1/2
        CHECK(std::abs(tau_closed(dmono(0, 2), DiskSide::minus, q).tau0_up - cplx(4.0 / 3.0)) <
              1e-14);
    }
    SECTION("off-diagonal monomials vanish") {
        for (int k : {-2, -1, 1, 2}) {
            TauValue v = tau_closed(dmono(k, 1), DiskSide::plus, q);
            CHECK(v.tau1 == cplx(0.0));
            CHECK(v.tau0_up == cplx(0.0));
            CHECK(v.tau0_dn == cplx(0.0));
        }
    }
    SECTION("linearity on random combinations") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> U(-2, 2);
        for (int t = 0; t < 50; ++t) {
            cplx c1(U(rng), U(rng)), c2(U(rng), U(rng));
            DiskElement x = dmono(0, 1, c1) + dmono(0, 3, c2);
            TauValue v = tau_closed(x, DiskSide::minus, q);
            TauValue v1 = tau_closed(dmono(0, 1), DiskSide::minus, q);
            TauValue v2 = tau_closed(dmono(0, 3), DiskSide::minus, q);
            CHECK(std::abs(v.tau0_up - (c1 * v1.tau0_up + c2 * v2.tau0_up)) < 1e-13);
        }
    }
}

TEST_CASE("numeric truncated-trace sweeps match the closed forms") {
    for (double q : {0.5, 0.8}) {
        const int N = 200;
        SECTION("identity: slope 1, intercepts -1/2 and 1/2, q=" + std::to_string(q)) {
            TauValue v = tau_numeric(DiskElement::one(), DiskSide::plus, N, q);
            CHECK(std::abs(v.tau1 - cplx(1.0)) < 1e-12);
            CHECK(std::abs(v.tau0_up - cplx(-0.5)) < 1e-10);
            CHECK(std::abs(v.tau0_dn - cplx(0.5)) < 1e-10);
        }
        SECTION("monomial grid k in [-3,3], m in [0,5], q=" + std::to_string(q)) {
            for (DiskSide side : {DiskSide::plus, DiskSide::minus})
                for (int k = -3; k <= 3; ++k)
                    for (int m = 0; m <= 5; ++m) {
                        TauValue num = tau_numeric(dmono(k, m), side, N, q);
                        TauValue cf = tau_closed(dmono(k, m), side, q);
                        CHECK(std::abs(num.tau1 - cf.tau1) < 1e-10);
                        CHECK(std::abs(num.tau0_up - cf.tau0_up) < 1e-10);
                        CHECK(std::abs(num.tau0_dn - cf.tau0_dn) < 1e-10);
                    }
        }
    }
    SECTION("instability reported for a rigged element") {
        // Feeding a cutoff too small for the decay makes the tail nonlinear.
        DiskElement slow = dmono(0, 1);
        CHECK_THROWS_AS(tau_numeric(slow, DiskSide::plus, 6, 0.97), FitInstabilityError);
    }
}

TEST_CASE("noncommutative integral of the identity") {
    const double q = 0.5;
    ZetaDOracle oracle;
    AlgebraElement one = AlgebraElement::one();
    CHECK(std::abs(nc_integral(one, 3, q) - cplx(oracle.res3)) < 1e-14);
    CHECK(std::abs(nc_integral(one, 2, q) - cplx(oracle.res2)) < 1e-14);
    CHECK(std::abs(nc_integral(one, 1, q) - cplx(oracle.res1)) < 1e-14);
    CHECK_THROWS_AS(nc_integral(symbol_of_pi(one, q), 4, q), std::invalid_argument);

    SECTION("up-compressed values") {
        CosphereElement s1 = symbol_of_pi(one, q);
        CHECK(std::abs(nc_integral_up(s1, 3, q) - cplx(1.0)) < 1e-14);
        CHECK(std::abs(nc_integral_up(s1, 1, q) - cplx(-0.25)) < 1e-14);
        // the pairing operand: 2 (1-q^2) 1 x b^2 at order 1 gives -1
        CosphereElement op = CosphereElement::monomial({{0, 0}, {0, 2}, 0}, 2.0 * (1.0 - q * q));
        CHECK(std::abs(nc_integral_up(op, 1, q) - cplx(-1.0)) < 1e-14);
    }

    SECTION("up plus down recovers the full integral") {
        std::mt19937_64 rng(23);
        std::uniform_int_distribution<int> pw(0, 2);
        for (int t = 0; t < 20; ++t) {
            CosphereElement sym =
                CosphereElement::monomial({{0, pw(rng)}, {0, pw(rng)}, 0}, cplx(1.0, 0.5)) +
                CosphereElement::monomial({{pw(rng), 0}, {0, pw(rng)}, 0}, 2.0);
            for (int k = 1; k <= 3; ++k)
                CHECK(std::abs(nc_integral(sym, k, q) -
                               (nc_integral_up(sym, k, q) + nc_integral_dn(sym, k, q))) < 1e-13);
        }
    }
}

TEST_CASE("numeric residues from level traces") {
    const double q = 0.5;
    SECTION("identity gives (2, 0, -1/2) and the oracle z=0 value") {
        ResidueTriple r = numeric_residues(ShiftOperator::identity(), 40);
        CHECK(std::abs(r.res3 - cplx(2.0)) < 1e-8);
        CHECK(std::abs(r.res2) < 1e-8);
        CHECK(std::abs(r.res1 - cplx(-0.5)) < 1e-8);
        ZetaDOracle oracle;
        CHECK(std::abs(*r.value_at_0 - cplx(oracle.at0())) < 1e-8);
    }
    SECTION("pi(bb*) agrees with the closed-form route") {
        AlgebraElement bbs = AlgebraElement::monomial({0, 1, 1});
        ResidueTriple r = numeric_residues(pi_of(bbs, q), 50);
        CHECK(std::abs(r.res3 - nc_integral(bbs, 3, q)) < 1e-6);
        CHECK(std::abs(r.res2 - nc_integral(bbs, 2, q)) < 1e-6);
        CHECK(std::abs(r.res1 - nc_integral(bbs, 1, q)) < 1e-6);
    }
    SECTION("pi(b^2 b*^2) agrees with the closed-form route") {
        AlgebraElement b2 = AlgebraElement::monomial({0, 2, 2});
        ResidueTriple r = numeric_residues(pi_of(b2, q), 50);
        CHECK(std::abs(r.res3 - nc_integral(b2, 3, q)) < 1e-6);
        CHECK(std::abs(r.res2 - nc_integral(b2, 2, q)) < 1e-6);
        CHECK(std::abs(r.res1 - nc_integral(b2, 1, q)) < 1e-6);
    }
    SECTION("a traceless operator gives the zero triple") {
        ResidueTriple r = numeric_residues(pi_of(AlgebraElement::monomial({1, 0, 0}), q), 30);
        CHECK(std::abs(r.res3) == 0.0);
        CHECK(std::abs(r.res2) == 0.0);
        CHECK(std::abs(r.res1) == 0.0);
    }
    SECTION("general-order residue extraction") {
        CHECK(std::abs(numeric_residue_at(ShiftOperator::identity(), 3, 2, Sector::up, 40) -
                       cplx(1.0)) < 1e-8);
        CHECK(std::abs(numeric_residue_at(ShiftOperator::identity(), 2, 2, Sector::up, 40)) < 1e-8);
    }
    SECTION("non-decaying remainder is diagnosed") {
        // |D| itself has cubic level traces, so the quadratic ansatz fails
        ShiftOperator bad = ShiftOperator::identity().left_diag(abs_dirac());
        CHECK_THROWS_AS(numeric_residues(bad, 40), NonDecayError);
        (void)q;
    }
}

TEST_CASE("zeta value at zero") {
    const double q = 0.5;
    SECTION("identity, up sector: Hurwitz split gives zero") {
        // per-level up trace is (2j+1)(2j+2) = h^2 - 1/4, so the value is
        // zeta(-2,3/2) - zeta(0,3/2)/4 = -1/4 + 1/4 = 0
        cplx v = zeta_at_zero(ShiftOperator::identity(), Projector::up, 40);
        CHECK(std::abs(v) < 1e-9);
        double expect = hurwitz_zeta(-2.0, 1.5) - 0.25 * hurwitz_zeta(0.0, 1.5);
        CHECK(std::abs(v - cplx(expect)) < 1e-9);
    }
    SECTION("zero operator") {
        CHECK(std::abs(zeta_at_zero(ShiftOperator::zero(), Projector::none, 30)) == 0.0);
    }
    SECTION("full-space value matches the zeta_D oracle") {
        ZetaDOracle oracle;
        cplx v = zeta_at_zero(ShiftOperator::identity(), Projector::none, 40);
        CHECK(std::abs(v - cplx(oracle.at0())) < 1e-9);
    }
}

TEST_CASE("operator-symbol consistency on the truncated space") {
    const double q = 0.5;
    const int max2j = 30;
    TruncatedSpace sp(max2j);
    for (AGen g : {AGen::a, AGen::b, AGen::a_star, AGen::b_star}) {
        AlgebraElement x = AlgebraElement::monomial(generator_mono(g));
        Eigen::SparseMatrix<cplx> sym_m = materialize_symbol(symbol_of_pi(x, q), sp, q);
        Eigen::SparseMatrix<cplx> diag_m = materialize(spin_diag(pi_of(x, q)), sp);
        Eigen::SparseMatrix<cplx> diff = sym_m - diag_m;
        // per-level sup over columns, away from the truncation cut
        std::vector<double> sup(max2j + 1, 0.0);
        for (int col = 0; col < diff.outerSize(); ++col) {
            int lev = sp.ket_at(col).j.twice;
            for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, col); it; ++it)
                sup[lev] = std::max(sup[lev], std::abs(it.value()));
        }
        for (int k = 8; k <= max2j - 2; k += 2) {
            INFO("generator " << int(g) << " level " << k);
            CHECK(sup[k] <= 5.0 * std::pow(q, 0.5 * k));
        }
    }
}
