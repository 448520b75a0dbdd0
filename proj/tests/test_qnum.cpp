#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>

#include "suq2/qnum.hpp"

using namespace suq2;

namespace {

// Independent oracle: direct partial sum with an integral tail estimate.
double hurwitz_partial_sum_oracle(double s, double a, int N = 200000) {
    double sum = 0;
    for (int k = N - 1; k >= 0; --k) sum += std::pow(k + a, -s);
    // Tail ~ integral_{N}^{inf} (x+a)^{-s} dx evaluated at the midpoint rule.
    sum += std::pow(N + a - 0.5, 1.0 - s) / (s - 1.0);
    return sum;
}

// Defining recurrence sum_{k=0}^{m} C(m+1,k) B_k = 0 for m >= 1.
double bernoulli_recurrence(int m) {
    std::vector<double> B(m + 1);
    B[0] = 1.0;
    for (int n = 1; n <= m; ++n) {
        double acc = 0;
        for (int k = 0; k < n; ++k) acc += binomial_coeff(n + 1, k) * B[k];
        B[n] = -acc / (n + 1);
    }
    return B[m];
}

}  // namespace

TEST_CASE("half-integer arithmetic is exact") {
    HalfInt j = HalfInt::from_twice(3);  // 3/2
    CHECK(j.value() == 1.5);
    CHECK_FALSE(j.is_integer());
    CHECK((j + half_one).value() == 2.0);
    CHECK((j + half_one).is_integer());
    CHECK((j - j).twice == 0);
    CHECK((-j).value() == -1.5);
    CHECK(HalfInt(2).twice == 4);
    CHECK(j.abs() == j);
    CHECK((-j).abs() == j);
}

TEST_CASE("deformation parameter range enforced") {
    CHECK_THROWS_AS(DeformParam(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DeformParam(1.0), std::invalid_argument);
    CHECK_THROWS_AS(DeformParam(-0.3), std::invalid_argument);
    CHECK(DeformParam(0.5).q == 0.5);
}

TEST_CASE("q-integers") {
    DeformParam q(0.5);
    CHECK(q_number(0.0, q) == 0.0);
    CHECK(q_number(1.0, q) == Catch::Approx(1.0).margin(1e-15));
    // [2] = q^{-1} + q
    CHECK(q_number(2.0, q) == Catch::Approx(2.5).margin(1e-14));
    CHECK(q_number(HalfInt::from_twice(4), q) == Catch::Approx(2.5).margin(1e-14));

    SECTION("antisymmetry") {
        for (int t = -10; t <= 10; ++t) {
            double N = 0.5 * t;
            CHECK(q_number(-N, q) == Catch::Approx(-q_number(N, q)).margin(1e-13));
        }
    }
    SECTION("classical limit at q -> 1") {
        DeformParam qc(0.999);
        for (int N = 1; N <= 10; ++N)
            CHECK(q_number(double(N), qc) == Catch::Approx(double(N)).margin(1e-2));
    }
}

TEST_CASE("bernoulli table matches the defining recurrence") {
    // The recurrence loses digits through cancellation, so the comparison is
    // relative to the size of the largest nearby value.
    for (int n = 0; n <= 26; ++n) {
        double scale = std::max({std::abs(bernoulli_number(n)), std::abs(bernoulli_recurrence(26)), 1.0});
        CHECK(bernoulli_number(n) == Catch::Approx(bernoulli_recurrence(n)).margin(1e-9 * scale));
    }
}

TEST_CASE("hurwitz zeta") {
    SECTION("s=2, a=1 equals pi^2/6 (partial-sum oracle)") {
        double target = M_PI * M_PI / 6.0;
        CHECK(hurwitz_partial_sum_oracle(2.0, 1.0) == Catch::Approx(target).epsilon(1e-12));
        CHECK(hurwitz_zeta(2.0, 1.0) == Catch::Approx(target).epsilon(1e-13));
    }
    SECTION("negative integers reduce to Bernoulli polynomials") {
        // -B_2(1)/2 = -1/12
        CHECK(hurwitz_zeta(-1.0, 1.0) == Catch::Approx(-1.0 / 12.0).epsilon(1e-14));
        // -B_1(3/2) = -1
        CHECK(hurwitz_zeta(0.0, 1.5) == Catch::Approx(-1.0).epsilon(1e-14));
        // -B_3(3/2)/3 with B_3(x) = x^3 - 1.5 x^2 + 0.5 x
        double b3 = 1.5 * 1.5 * 1.5 - 1.5 * 1.5 * 1.5 + 0.5 * 1.5;
        CHECK(hurwitz_zeta(-2.0, 1.5) == Catch::Approx(-b3 / 3.0).margin(1e-14));
    }
    SECTION("Riemann reference values") {
        CHECK(hurwitz_zeta(2.0, 1.0) == Catch::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
        CHECK(hurwitz_zeta(3.0, 1.0) == Catch::Approx(1.2020569031595942854).epsilon(1e-12));
        CHECK(hurwitz_zeta(4.0, 1.0) ==
              Catch::Approx(M_PI * M_PI * M_PI * M_PI / 90.0).epsilon(1e-12));
    }
    SECTION("pole reported") {
        CHECK_THROWS_AS(hurwitz_zeta(1.0, 1.0), PoleError);
        CHECK_THROWS_AS(zeta_value(1.0, 0.5), PoleError);
    }
    SECTION("offset identity zeta(s,a) = zeta(s,a+1) + a^{-s}") {
        for (double s : {2.5, 1.5, 3.0, 0.5}) {
            double lhs = hurwitz_zeta(s, 0.5);
            double rhs = hurwitz_zeta(s, 1.5) + std::pow(0.5, -s);
            CHECK(lhs == Catch::Approx(rhs).epsilon(1e-13));
        }
    }
    SECTION("extended precision path") {
        using Real = boost::multiprecision::cpp_bin_float_50;
        Real pi = acos(Real(-1));
        Real z2 = hurwitz_zeta<Real>(Real(2), Real(1));
        Real err = abs(z2 - pi * pi / 6);
        CHECK(err < Real("1e-45"));
        // closed form at a negative integer stays exact
        Real zm1 = hurwitz_zeta<Real>(Real(-1), Real(1));
        CHECK(abs(zm1 + Real(1) / 12) < Real("1e-45"));
    }
}

TEST_CASE("zeta_value tags the Bernoulli identity") {
    auto zv = zeta_value(-2.0, 1.5);
    CHECK(zv.s == -2.0);
    CHECK(zv.a == 1.5);
    CHECK(zv.value == Catch::Approx(-bernoulli_poly(3, 1.5) / 3.0).margin(1e-15));
}

TEST_CASE("residue_weights") {
    const double off = 1.5;
    SECTION("pure quadratic") {
        std::vector<double> t(64);
        for (int k = 0; k < 64; ++k) t[k] = (k + off) * (k + off);
        auto w = residue_weights(t, off);
        CHECK(w.c2 == Catch::Approx(1.0).margin(1e-11));
        CHECK(w.c1 == Catch::Approx(0.0).margin(1e-10));
        CHECK(w.c0 == Catch::Approx(0.0).margin(1e-9));
        CHECK(w.f0 == Catch::Approx(hurwitz_zeta(-2.0, off)).margin(1e-8));
    }
    SECTION("constant levels") {
        std::vector<double> t(64, 1.0);
        auto w = residue_weights(t, off);
        CHECK(w.c2 == Catch::Approx(0.0).margin(1e-12));
        CHECK(w.c1 == Catch::Approx(0.0).margin(1e-12));
        CHECK(w.c0 == Catch::Approx(1.0).margin(1e-12));
        CHECK(w.f0 == Catch::Approx(hurwitz_zeta(0.0, off)).margin(1e-10));
    }
    SECTION("linear plus geometric remainder") {
        std::vector<double> t(64);
        double gsum = 0;
        for (int k = 0; k < 64; ++k) {
            t[k] = (k + off) + std::pow(2.0, -k);
            gsum += std::pow(2.0, -k);
        }
        auto w = residue_weights(t, off);
        CHECK(w.c1 == Catch::Approx(1.0).margin(1e-10));
        CHECK(w.c2 == Catch::Approx(0.0).margin(1e-11));
        // f0 = sum 2^{-k} + zeta(-1, 3/2); the geometric sum is 2 up to 2^-63
        CHECK(w.f0 == Catch::Approx(gsum + hurwitz_zeta(-1.0, off)).margin(1e-8));
    }
    SECTION("planted coefficients recovered on random input") {
        std::mt19937_64 rng(20240817);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        for (int trial = 0; trial < 20; ++trial) {
            double c2 = U(rng), c1 = U(rng), c0 = U(rng), amp = U(rng);
            std::vector<double> t(80);
            for (int k = 0; k < 80; ++k) {
                double h = k + off;
                t[k] = c2 * h * h + c1 * h + c0 + amp * std::pow(0.6, k);
            }
            auto w = residue_weights(t, off);
            CHECK(w.c2 == Catch::Approx(c2).margin(1e-10));
            CHECK(w.c1 == Catch::Approx(c1).margin(1e-10));
            CHECK(w.c0 == Catch::Approx(c0).margin(1e-10));
        }
    }
    SECTION("non-decaying remainder rejected") {
        std::vector<double> t(64);
        for (int k = 0; k < 64; ++k) t[k] = std::pow(k + off, 2.7);
        CHECK_THROWS_AS(residue_weights(t, off), NonDecayError);
    }
    SECTION("extended precision recovers tighter") {
        using Real = boost::multiprecision::cpp_bin_float_50;
        std::vector<Real> t(64);
        for (int k = 0; k < 64; ++k) {
            Real h = Real(k) + Real(3) / 2;
            t[k] = h * h - Real(1) / 4;
        }
        auto w = residue_weights<Real>(t, Real(3) / 2);
        CHECK(abs(w.c2 - 1) < Real("1e-30"));
        CHECK(abs(w.c0 + Real(1) / 4) < Real("1e-28"));
    }
}
