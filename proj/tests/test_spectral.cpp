#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "suq2/spectral.hpp"

using namespace suq2;

namespace {

SpinKet make(int j2, int mu2, int n2, Spin s) {
    return SpinKet{HalfInt::from_twice(j2), HalfInt::from_twice(mu2), HalfInt::from_twice(n2), s};
}

// max |amplitude| of op over all sources with 2j <= maxk (symbolic, so no
// truncation effects enter).
double residual_sup(const ShiftOperator& op, int maxk) {
    double sup = 0;
    for (int k = 0; k <= maxk; ++k) sup = std::max(sup, level_sup_entry(op, k));
    return sup;
}

double col_diff(const ShiftOperator& A, const ShiftOperator& B, const SpinKet& src) {
    auto ca = A.column(src);
    auto cb = B.column(src);
    std::map<SpinKet, cplx> m;
    for (auto& [k, v] : ca) m[k] += v;
    for (auto& [k, v] : cb) m[k] -= v;
    double sup = 0;
    for (auto& [k, v] : m) sup = std::max(sup, std::abs(v));
    return sup;
}

}  // namespace

TEST_CASE("spinor representation coefficients match the printed matrices") {
    const double q = 0.5;
    DeformParam qp(q);
    auto qn = [&](double N) { return q_number(N, qp); };

    // Independent scalar evaluation of the a_+ entries at (j=0, mu=0, n=-1/2):
    // prefactor q^{(mu+n-1/2)/2} [j+mu+1]^{1/2}, up->up entry
    // q^{-j-1/2} [j+n+3/2]^{1/2} / [2j+2], up->dn entry
    // q^{1/2} [j-n+1/2]^{1/2} / ([2j+1][2j+2]).
    double pref = std::pow(q, (0.0 - 0.5 - 0.5) / 2.0) * std::sqrt(qn(1));
    double up_up = pref * std::pow(q, -0.5) * std::sqrt(qn(0.0 - 0.5 + 1.5)) / qn(2);
    double up_dn = pref * std::pow(q, 0.5) * std::sqrt(qn(0.0 + 0.5 + 0.5)) / (qn(1) * qn(2));

    auto [key, raw] = spin_rep_raw(Gen::a_plus, q);
    Mat2 m = raw(HalfInt(0), HalfInt(0), HalfInt::from_twice(-1));
    CHECK(std::abs(m(Spin::up, Spin::up) - up_up) < 1e-14);
    CHECK(std::abs(m(Spin::dn, Spin::up) - up_dn) < 1e-14);
    CHECK(std::abs(m(Spin::up, Spin::dn)) == 0.0);
    // and the quoted value q^{-1/2} * 1 * q^{-1/2} * [1]^{1/2} / [2]
    CHECK(std::abs(m(Spin::up, Spin::up) - std::pow(q, -1.0) / qn(2)) < 1e-14);

    SECTION("boundary coefficients vanish analytically") {
        for (Gen g : {Gen::a_plus, Gen::a_minus, Gen::b_plus, Gen::b_minus}) {
            auto [sh, rawg] = spin_rep_raw(g, q);
            for (int k = 0; k <= 9; ++k)
                for (int mu2 = -k; mu2 <= k; mu2 += 2)
                    for (int n2 = -(k + 1); n2 <= k + 1; n2 += 2) {
                        SpinKet srcu = make(k, mu2, n2, Spin::up);
                        SpinKet srcd = make(k, mu2, n2, Spin::dn);
                        Mat2 v{};
                        bool have = false;
                        for (int s = 0; s < 2; ++s) {
                            SpinKet src = s == 0 ? srcu : srcd;
                            if (!valid_ket(src)) continue;
                            for (int t = 0; t < 2; ++t) {
                                SpinKet dst{src.j + sh.dj, src.mu + sh.dmu, src.n + sh.dn, Spin(t)};
                                if (valid_ket(dst)) continue;
                                if (!have) {
                                    v = rawg(src.j, src.mu, src.n);
                                    have = true;
                                }
                                // source valid, target invalid: analytic zero
                                CHECK(std::abs(v.m[t][s]) < 1e-14);
                            }
                        }
                    }
        }
    }
}

TEST_CASE("star structure and defining relations") {
    for (double q : {0.3, 0.5, 0.8}) {
        ShiftOperator A = spin_rep(Gen::a, q);
        ShiftOperator As = spin_rep(Gen::a_star, q);
        ShiftOperator B = spin_rep(Gen::b, q);
        ShiftOperator Bs = spin_rep(Gen::b_star, q);
        ShiftOperator one = ShiftOperator::identity();

        SECTION("adjoint consistency as matrices, q=" + std::to_string(q)) {
            TruncatedSpace sp(10);
            SparseMat ma = materialize(A, sp);
            SparseMat mas = materialize(As, sp);
            SparseMat diff = SparseMat(ma.adjoint()) - mas;
            double sup = 0;
            for (int c = 0; c < diff.outerSize(); ++c)
                for (SparseMat::InnerIterator it(diff, c); it; ++it)
                    sup = std::max(sup, std::abs(it.value()));
            CHECK(sup < 1e-13);
        }

        // ba = q ab, b*a = q a b*, bb* = b*b, a*a + q^2 b*b = 1, aa* + bb* = 1
        std::vector<std::pair<std::string, ShiftOperator>> rels = {
            {"ba=qab", B * A - q * (A * B)},
            {"b*a=qab*", Bs * A - q * (A * Bs)},
            {"bb*=b*b", B * Bs - Bs * B},
            {"a*a+q^2b*b=1", As * A + (q * q) * (Bs * B) - one},
            {"aa*+bb*=1", A * As + B * Bs - one},
        };
        for (auto& [name, resid] : rels) {
            INFO("relation " << name << " at q = " << q);
            CHECK(residual_sup(resid, 10) < 1e-12);
        }
    }
}

TEST_CASE("dirac family") {
    TruncatedSpace sp(8);
    SECTION("eigenvalues") {
        CHECK(dirac().eigenvalue(HalfInt(0), Spin::up) == 1.5);
        CHECK(dirac().eigenvalue(HalfInt::from_twice(3), Spin::dn) == -3.5);
        CHECK(abs_dirac().eigenvalue(HalfInt::from_twice(3), Spin::dn) == 3.5);
    }
    SECTION("F^2 = 1 and P_up + P_dn = 1") {
        SparseMat f = materialize(sign_f(), sp);
        SparseMat one = materialize(ShiftOperator::identity(), sp);
        CHECK((SparseMat(f * f) - one).norm() == 0.0);
        SparseMat p = materialize(proj_up(), sp) + materialize(proj_dn(), sp);
        CHECK((p - one).norm() == 0.0);
    }
}

TEST_CASE("delta identities hold at the shift-term level") {
    const double q = 0.5;
    auto Pu = proj_up();
    auto Pd = proj_dn();
    auto sandwich = [&](const ShiftOperator& x, const DiagonalOperator& p) {
        return x.left_diag(p).right_diag(p);
    };
    TruncatedSpace sp(9);

    auto check_equal = [&](const ShiftOperator& L, const ShiftOperator& R) {
        double sup = 0;
        for (std::size_t i = 0; i < sp.dimension(); ++i)
            sup = std::max(sup, col_diff(L, R, sp.ket_at(i)));
        CHECK(sup < 1e-13);
    };

    ShiftOperator ap = spin_rep(Gen::a_plus, q), am = spin_rep(Gen::a_minus, q);
    ShiftOperator bp = spin_rep(Gen::b_plus, q), bm = spin_rep(Gen::b_minus, q);

    // delta(a_+) = P^u a_+ P^u + P^d a_+ P^d and the signed partner
    check_equal(delta(ap), sandwich(ap, Pu) + sandwich(ap, Pd));
    check_equal(delta(am), (sandwich(am, Pu) + sandwich(am, Pd)) * cplx(-1.0));
    check_equal(delta(bp), sandwich(bp, Pu) + sandwich(bp, Pd));
    check_equal(delta(bm), (sandwich(bm, Pu) + sandwich(bm, Pd)) * cplx(-1.0));

    // delta([D, x_pm]) = P^u x_pm P^u - P^d x_pm P^d
    check_equal(delta(commutator_d(ap)), sandwich(ap, Pu) - sandwich(ap, Pd));
    check_equal(delta(commutator_d(am)), sandwich(am, Pu) - sandwich(am, Pd));
    check_equal(delta(commutator_d(bp)), sandwich(bp, Pu) - sandwich(bp, Pd));
    check_equal(delta(commutator_d(bm)), sandwich(bm, Pu) - sandwich(bm, Pd));

    SECTION("delta is a derivation") {
        std::mt19937_64 rng(3);
        std::vector<ShiftOperator> pool = {spin_rep(Gen::a, q), spin_rep(Gen::b_star, q),
                                           spin_rep(Gen::b, q) * spin_rep(Gen::a_star, q)};
        for (auto& S : pool)
            for (auto& T : pool) {
                ShiftOperator lhs = delta(S * T);
                ShiftOperator rhs = delta(S) * T + S * delta(T);
                std::uniform_int_distribution<std::size_t> pick(0, sp.dimension() - 1);
                for (int trial = 0; trial < 25; ++trial) {
                    SpinKet k = sp.ket_at(pick(rng));
                    CHECK(col_diff(lhs, rhs, k) < 1e-12);
                }
            }
    }

    SECTION("norm bound |delta(pi(a))| <= |pi(a)|") {
        TruncatedSpace sp20(20);
        double na = operator_norm_estimate(materialize(spin_rep(Gen::a, q), sp20), 120);
        double nd = operator_norm_estimate(materialize(delta(spin_rep(Gen::a, q)), sp20), 120);
        CHECK(nd <= na * (1.0 + 1e-8) + 1e-9);
    }

    SECTION("[D^2, 1] = 0") {
        ShiftOperator z = nabla(ShiftOperator::identity());
        CHECK(residual_sup(z, 8) == 0.0);
    }

    SECTION("nabla raises order: entries grow linearly in j") {
        ShiftOperator na = nabla(spin_rep(Gen::a, q));
        ShiftOperator a = spin_rep(Gen::a, q);
        double r20 = level_sup_entry(na, 20) / level_sup_entry(a, 20);
        double r40 = level_sup_entry(na, 40) / level_sup_entry(a, 40);
        CHECK(r40 / r20 == Catch::Approx(2.0).margin(0.25));
    }
}

TEST_CASE("approximate representation") {
    const double q = 0.5;

    SECTION("scalar matrices in the xy relabelling") {
        TruncatedSpace sp(9);
        std::mt19937_64 rng(12);
        std::uniform_int_distribution<std::size_t> pick(0, sp.dimension() - 1);
        ShiftOperator ua = approx_rep(Gen::a_plus, q);
        ShiftOperator um = approx_rep(Gen::a_minus, q);
        ShiftOperator ub = approx_rep(Gen::b_plus, q);
        ShiftOperator ud = approx_rep(Gen::b_minus, q);
        for (int t = 0; t < 300; ++t) {
            SpinKet k = sp.ket_at(pick(rng));
            XYKet v = to_xy(k);
            double x = v.x, y = v.y;
            // ul a_+ : sqrt(1-q^{2x+2}) sqrt(1-q^{2y+2}) at (x+1, y+1)
            for (auto& [dst, amp] : ua.column(k)) {
                XYKet w = to_xy(dst);
                CHECK(w.x == v.x + 1);
                CHECK(w.y == v.y + 1);
                CHECK(std::abs(amp - std::sqrt(1 - std::pow(q, 2 * x + 2)) *
                                         std::sqrt(1 - std::pow(q, 2 * y + 2))) < 1e-14);
            }
            // ul a_- : q^{x+y+1} at (x, y)
            for (auto& [dst, amp] : um.column(k)) {
                XYKet w = to_xy(dst);
                CHECK(w.x == v.x);
                CHECK(w.y == v.y);
                CHECK(std::abs(amp - std::pow(q, x + y + 1)) < 1e-14);
            }
            // ul b_+ : q^y sqrt(1-q^{2x+2}) at (x+1, y)
            for (auto& [dst, amp] : ub.column(k)) {
                XYKet w = to_xy(dst);
                CHECK(w.x == v.x + 1);
                CHECK(w.y == v.y);
                CHECK(std::abs(amp - std::pow(q, y) * std::sqrt(1 - std::pow(q, 2 * x + 2))) < 1e-14);
            }
            // ul b_- : -q^x sqrt(1-q^{2y}) at (x, y-1)
            for (auto& [dst, amp] : ud.column(k)) {
                XYKet w = to_xy(dst);
                CHECK(w.x == v.x);
                CHECK(w.y == v.y - 1);
                CHECK(std::abs(amp + std::pow(q, x) * std::sqrt(1 - std::pow(q, 2 * y))) < 1e-14);
            }
        }
    }

    SECTION("F commutes with the underlined generators") {
        for (Gen g : {Gen::a_plus, Gen::a_minus, Gen::b_plus, Gen::b_minus}) {
            ShiftOperator x = approx_rep(g, q);
            ShiftOperator f = ShiftOperator::from_diagonal(sign_f());
            CHECK(residual_sup(f * x - x * f, 8) == 0.0);
        }
    }

    SECTION("[|D|, pi_approx(a)] = ul a_+ - ul a_- and the D version") {
        ShiftOperator lhs = delta(approx_rep(Gen::a, q));
        ShiftOperator rhs = approx_rep(Gen::a_plus, q) - approx_rep(Gen::a_minus, q);
        CHECK(residual_sup(lhs - rhs, 9) < 1e-14);
        ShiftOperator lhsD = commutator_d(approx_rep(Gen::a, q));
        ShiftOperator rhsD = rhs.left_diag(sign_f());
        CHECK(residual_sup(lhsD - rhsD, 9) < 1e-14);
        ShiftOperator lhsB = delta(approx_rep(Gen::b, q));
        ShiftOperator rhsB = approx_rep(Gen::b_plus, q) - approx_rep(Gen::b_minus, q);
        CHECK(residual_sup(lhsB - rhsB, 9) < 1e-14);
    }

    SECTION("difference from the spinor representation decays like q^{2j}") {
        for (Gen g : {Gen::a, Gen::b, Gen::a_star, Gen::b_star}) {
            ShiftOperator diff = spin_rep(g, q) - approx_rep(g, q);
            double prev_ratio = 0;
            for (int k = 6; k <= 30; k += 4) {
                double sup = level_sup_entry(diff, k);
                double ratio = sup / std::pow(q, k);  // q^{2j} with k = 2j
                if (k > 6) CHECK(ratio < prev_ratio * 1.05 + 1e-12);
                prev_ratio = ratio;
            }
        }
    }

    SECTION("smoothing: difference times |D|^k stays per-level small, k <= 5") {
        for (Gen g : {Gen::a, Gen::b, Gen::a_star, Gen::b_star}) {
            ShiftOperator diff = spin_rep(g, q) - approx_rep(g, q);
            for (int kk = 1; kk <= 5; ++kk) {
                ShiftOperator amplified = diff.right_diag(abs_dirac_pow(double(kk)));
                double s10 = level_sup_entry(amplified, 10);
                double s18 = level_sup_entry(amplified, 18);
                double s26 = level_sup_entry(amplified, 26);
                CHECK(s18 < s10);
                CHECK(s26 < s18);
            }
        }
    }
}

TEST_CASE("materialization") {
    const double q = 0.5;
    TruncatedSpace sp(8);

    SECTION("identity materializes to the identity") {
        SparseMat one = materialize(ShiftOperator::identity(), sp);
        CHECK(one.nonZeros() == long(sp.dimension()));
        CHECK(std::abs(Eigen::MatrixXcd(one).trace() - cplx(double(sp.dimension()))) == 0.0);
    }

    SECTION("nnz bound for pi(a)") {
        SparseMat ma = materialize(spin_rep(Gen::a, q), sp);
        CHECK(ma.nonZeros() <= 8 * long(sp.dimension()));
    }

    SECTION("strict truncation errors, drop mode does not") {
        CHECK_THROWS_AS(materialize(spin_rep(Gen::a, q), sp, TruncationPolicy::strict),
                        TruncationError);
        CHECK_NOTHROW(materialize(spin_rep(Gen::a, q), sp, TruncationPolicy::drop));
        CHECK_NOTHROW(materialize(ShiftOperator::identity(), sp, TruncationPolicy::strict));
    }
}

TEST_CASE("binomial expansion of [|D|^z, T]") {
    const double q = 0.5;
    SECTION("T = identity gives an exactly zero residual") {
        auto chk = binomial_expansion_check(ShiftOperator::identity(), -1.0, 3, 6, 20);
        for (double r : chk.residual_sup) CHECK(r == 0.0);
    }
    SECTION("T = pi(a), z = -1, K = 3 decays like j^{-5}") {
        auto chk = binomial_expansion_check(spin_rep(Gen::a, q), -1.0, 3, 10, 40);
        CHECK(chk.fitted_exponent == Catch::Approx(-5.0).margin(0.8));
        // absolute smallness at the far end: C j^{z-K-1}
        CHECK(chk.residual_sup.back() < 20.0 * std::pow(40 + 1.5, -5.0));
    }
    SECTION("T = P pi(a) P, z = -2, K = 2 decays like j^{-5}") {
        ShiftOperator t = spin_rep(Gen::a, q).left_diag(proj_up()).right_diag(proj_up());
        auto chk = binomial_expansion_check(t, -2.0, 2, 10, 40);
        CHECK(chk.fitted_exponent == Catch::Approx(-5.0).margin(0.8));
    }
}
