#pragma once

// Exact half-integer label arithmetic, q-integers, and the Hurwitz-zeta /
// Bernoulli machinery behind the residue extraction.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace suq2 {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Half-integers.  All basis labels (j, mu, n) move in steps of 1/2, so we
// store twice the value and never touch floating point for bookkeeping.
struct HalfInt {
    int twice = 0;

    constexpr HalfInt() = default;
    constexpr HalfInt(int whole) : twice(2 * whole) {}

    static constexpr HalfInt from_twice(int t) {
        HalfInt h;
        h.twice = t;
        return h;
    }

    constexpr bool is_integer() const { return twice % 2 == 0; }
    constexpr double value() const { return 0.5 * twice; }

    constexpr HalfInt operator-() const { return from_twice(-twice); }
    constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice + o.twice); }
    constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice - o.twice); }
    constexpr HalfInt abs() const { return from_twice(twice < 0 ? -twice : twice); }

    constexpr auto operator<=>(const HalfInt&) const = default;
};

inline constexpr HalfInt half_one = HalfInt::from_twice(1);

inline std::string to_string(HalfInt h) {
    if (h.is_integer()) return std::to_string(h.twice / 2);
    return std::to_string(h.twice) + "/2";
}

// ---------------------------------------------------------------------------
// Deformation parameter, 0 < q < 1 enforced at construction.
struct DeformParam {
    double q;
    explicit DeformParam(double q_) : q(q_) {
        if (!(q > 0.0 && q < 1.0))
            throw std::invalid_argument("DeformParam: q must satisfy 0 < q < 1");
    }
};

// q-integer [N] = (q^{-N} - q^N) / (q^{-1} - q).
inline double q_number(double N, const DeformParam& qp) {
    const double q = qp.q;
    return (std::pow(q, -N) - std::pow(q, N)) / (1.0 / q - q);
}

inline double q_number(HalfInt N, const DeformParam& qp) { return q_number(N.value(), qp); }

// ---------------------------------------------------------------------------
// Bernoulli numbers B_0 .. B_26 as exact rationals (odd ones beyond B_1
// vanish); a unit test cross-checks them against the defining recurrence.
struct BernoulliRatio {
    long long num;
    long long den;
};

inline BernoulliRatio bernoulli_ratio(int n) {
    switch (n) {
        case 0: return {1, 1};
        case 1: return {-1, 2};
        case 2: return {1, 6};
        case 4: return {-1, 30};
        case 6: return {1, 42};
        case 8: return {-1, 30};
        case 10: return {5, 66};
        case 12: return {-691, 2730};
        case 14: return {7, 6};
        case 16: return {-3617, 510};
        case 18: return {43867, 798};
        case 20: return {-174611, 330};
        case 22: return {854513, 138};
        case 24: return {-236364091, 2730};
        case 26: return {8553103, 6};
        default:
            if (n > 26) throw std::out_of_range("bernoulli_ratio: table ends at B_26");
            return {0, 1};  // odd n >= 3
    }
}

template <typename Real = double>
Real bernoulli_number_as(int n) {
    auto r = bernoulli_ratio(n);
    return Real(r.num) / Real(r.den);
}

inline double bernoulli_number(int n) { return bernoulli_number_as<double>(n); }

inline double binomial_coeff(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= double(n - k + i) / double(i);
    return r;
}

// Bernoulli polynomial B_n(x) = sum_k C(n,k) B_k x^{n-k}.
template <typename Real = double>
Real bernoulli_poly(int n, Real x) {
    using std::pow;
    Real acc = 0;
    for (int k = 0; k <= n; ++k) {
        if (bernoulli_ratio(k).num == 0) continue;
        acc += Real(binomial_coeff(n, k)) * bernoulli_number_as<Real>(k) * pow(x, Real(n - k));
    }
    return acc;
}

// Thrown when a zeta value is requested at the simple pole s = 1.
struct PoleError : std::domain_error {
    explicit PoleError(const std::string& msg) : std::domain_error(msg) {}
};

// ---------------------------------------------------------------------------
// Hurwitz zeta  zeta(s, a) = sum_{k>=0} (k+a)^{-s},  real s != 1, a > 0.
//
// Non-positive integer s uses the closed form -B_{n+1}(a)/(n+1); elsewhere
// Euler-Maclaurin with the direct-sum cutoff scaled to the precision of Real.
template <typename Real = double>
Real hurwitz_zeta(Real s, Real a) {
    using std::abs;
    using std::pow;
    if (!(a > Real(0))) throw std::invalid_argument("hurwitz_zeta: a must be positive");
    if (s == Real(1)) throw PoleError("hurwitz_zeta: pole at s = 1");

    const double sd = static_cast<double>(s);
    if (sd <= 0.0 && sd == std::floor(sd)) {
        int n = static_cast<int>(-sd);
        return -bernoulli_poly<Real>(n + 1, a) / Real(n + 1);
    }

    const int digits = std::numeric_limits<Real>::digits10;
    // Remainder after M correction terms ~ (2M)!/(2 pi N)^{2M}; with the table
    // capped at B_26 (M = 13) the direct sum has to carry the precision.
    const int N = digits <= 17 ? 28 : 32 + 14 * digits;
    const int M = 13;

    Real sum = 0;
    for (int k = 0; k < N; ++k) sum += pow(Real(k) + a, -s);

    const Real w = Real(N) + a;
    sum += pow(w, Real(1) - s) / (s - Real(1));
    sum += pow(w, -s) / Real(2);

    // sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * w^{-s-2j+1}
    Real rising = s;       // s(s+1)...(s+2j-2), updated incrementally
    Real factorial = 2;    // (2j)!
    for (int j = 1; j <= M; ++j) {
        Real term = bernoulli_number_as<Real>(2 * j) / factorial * rising * pow(w, -s - Real(2 * j - 1));
        sum += term;
        if (abs(term) < abs(sum) * std::numeric_limits<Real>::epsilon()) break;
        rising *= (s + Real(2 * j - 1)) * (s + Real(2 * j));
        factorial *= Real(2 * j + 1) * Real(2 * j + 2);
    }
    return sum;
}

// A tagged zeta evaluation; the Bernoulli identity at non-positive integers
// is what the residue engine leans on.
struct ZetaValue {
    double s = 0;
    double a = 1;
    double value = 0;
};

inline ZetaValue zeta_value(double s, double a) { return ZetaValue{s, a, hurwitz_zeta(s, a)}; }

// ---------------------------------------------------------------------------
// Level-trace fitting.
//
// Given per-level values t_k = sum_p c_p (k+offset)^p + r_k with r_k of rapid
// decay, recover the c_p on a tail window and the z = 0 evaluation datum
// f0 = sum_k r_k + sum_p c_p zeta(-p, offset).

struct FitDiagnostics {
    double tail_residual = 0;   // max |r_k| on the last quarter of the window
    double mid_residual = 0;    // max |r_k| on the third quarter
    bool remainder_decays = true;
};

struct NonDecayError : std::runtime_error {
    explicit NonDecayError(const std::string& msg) : std::runtime_error(msg) {}
};

// Least squares of t_k against (k+offset)^p, p = degree..0, on the window
// [K/2, K].  The basis is centred and scaled before a modified Gram-Schmidt
// QR so planted coefficients come back at working precision.
template <typename Real = double>
std::vector<Real> level_polynomial_fit(const std::vector<Real>& t, Real offset, int degree,
                                       FitDiagnostics* diag = nullptr, double noise_floor = 0.0) {
    using std::abs;
    using std::pow;
    using std::sqrt;
    const int K = static_cast<int>(t.size());
    if (K < 2 * (degree + 2)) throw std::invalid_argument("level_polynomial_fit: too few levels");
    const int lo = K / 2;
    const int rows = K - lo;
    const int cols = degree + 1;

    Real hbar = 0, hmax = 0;
    for (int k = lo; k < K; ++k) hbar += Real(k) + offset;
    hbar /= Real(rows);
    for (int k = lo; k < K; ++k) {
        Real dev = abs(Real(k) + offset - hbar);
        if (dev > hmax) hmax = dev;
    }

    // design matrix in the shifted basis u^p, u = (h - hbar)/hmax
    std::vector<std::vector<Real>> A(cols, std::vector<Real>(rows));
    std::vector<Real> y(rows);
    for (int r = 0; r < rows; ++r) {
        const Real u = (Real(lo + r) + offset - hbar) / hmax;
        Real up = 1;
        for (int c = 0; c <= degree; ++c) {
            A[c][r] = up;
            up *= u;
        }
        y[r] = t[lo + r];
    }

    // modified Gram-Schmidt QR
    std::vector<std::vector<Real>> Q = A;
    std::vector<std::vector<Real>> R(cols, std::vector<Real>(cols, Real(0)));
    for (int c = 0; c < cols; ++c) {
        for (int p = 0; p < c; ++p) {
            Real dot = 0;
            for (int r = 0; r < rows; ++r) dot += Q[p][r] * Q[c][r];
            R[p][c] = dot;
            for (int r = 0; r < rows; ++r) Q[c][r] -= dot * Q[p][r];
        }
        Real nrm = 0;
        for (int r = 0; r < rows; ++r) nrm += Q[c][r] * Q[c][r];
        nrm = sqrt(nrm);
        R[c][c] = nrm;
        for (int r = 0; r < rows; ++r) Q[c][r] /= nrm;
    }
    std::vector<Real> qy(cols, Real(0)), beta(cols, Real(0));
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) qy[c] += Q[c][r] * y[r];
    for (int c = cols - 1; c >= 0; --c) {
        Real v = qy[c];
        for (int p = c + 1; p < cols; ++p) v -= R[c][p] * beta[p];
        beta[c] = v / R[c][c];
    }

    // convert from the shifted basis u^p back to h^p
    std::vector<Real> coeff(cols, Real(0));  // coeff[p] multiplies h^p
    for (int p = 0; p <= degree; ++p) {
        // beta[p] * ((h - hbar)/hmax)^p
        for (int m = 0; m <= p; ++m) {
            Real c = beta[p] * Real(binomial_coeff(p, m)) * pow(-hbar, Real(p - m)) / pow(hmax, Real(p));
            coeff[m] += c;
        }
    }

    if (diag) {
        auto fitted = [&](int k) {
            Real h = Real(k) + offset, hp = 1, v = 0;
            for (int p = 0; p <= degree; ++p) {
                v += coeff[p] * hp;
                hp *= h;
            }
            return v;
        };
        Real rmid = 0, rtail = 0;
        for (int k = lo; k < K; ++k) {
            Real r = abs(t[k] - fitted(k));
            if (k < lo + rows / 2)
                rmid = std::max(rmid, r);
            else
                rtail = std::max(rtail, r);
        }
        diag->mid_residual = static_cast<double>(rmid);
        diag->tail_residual = static_cast<double>(rtail);
        double scale = 0;
        for (int k = lo; k < K; ++k) scale = std::max(scale, std::abs(static_cast<double>(t[k])));
        // rapid decay: the tail residual must shrink against the mid window,
        // up to the caller's rounding-noise floor
        diag->remainder_decays = diag->tail_residual <=
                                 0.5 * diag->mid_residual +
                                     std::max(noise_floor, 1e-12 * (scale + 1.0));
    }
    return coeff;
}

template <typename Real = double>
struct ResidueWeights {
    Real c2 = 0, c1 = 0, c0 = 0;  // residues of sum_k t_k h^{-z} at z = 3, 2, 1
    Real f0 = 0;                  // value of the continued sum at z = 0
    FitDiagnostics diag;
};

// Quadratic case of the level fit: t_k = c2 h^2 + c1 h + c0 + r_k with h =
// k + offset.  f0 collects sum r_k plus the zeta(-p, offset) weights.
template <typename Real = double>
ResidueWeights<Real> residue_weights(const std::vector<Real>& t, Real offset,
                                     double noise_floor = 0.0) {
    using std::abs;
    ResidueWeights<Real> w;
    auto coeff = level_polynomial_fit<Real>(t, offset, 2, &w.diag, noise_floor);
    if (!w.diag.remainder_decays)
        throw NonDecayError("residue_weights: level remainder does not decay");
    w.c2 = coeff[2];
    w.c1 = coeff[1];
    w.c0 = coeff[0];
    Real rsum = 0;
    for (int k = 0; k < static_cast<int>(t.size()); ++k) {
        Real h = Real(k) + offset;
        rsum += t[k] - (w.c2 * h * h + w.c1 * h + w.c0);
    }
    w.f0 = rsum + w.c2 * hurwitz_zeta<Real>(Real(-2), offset) +
           w.c1 * hurwitz_zeta<Real>(Real(-1), offset) + w.c0 * hurwitz_zeta<Real>(Real(0), offset);
    return w;
}

}  // namespace suq2
