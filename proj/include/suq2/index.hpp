#pragma once

// The index machinery: the local cocycle psi_1 and its companions, the
// Chern character chi_1, the K_1 generator U, and the Fredholm index both by
// kernel dimensions and by the parametrix trace formula.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <array>
#include <stdexcept>
#include <vector>

#include "suq2/residues.hpp"

namespace suq2 {

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& m) : std::runtime_error(m) {}
};

// Levels needed before the q^k-sized level-trace remainders drop below the
// fit tolerance of the numeric psi_1 route.
inline int psi_numeric_levels(double q, int base = 60) {
    int K = int(std::ceil(std::log(1e-10) / std::log(q)));
    return std::min(200, std::max(base, K));
}

// Levels needed before the q^{2k}-sized corner entries stop mattering.
inline int rapid_decay_levels(double q, int requested, double target = 1e-10, int cap = 160) {
    int K = requested;
    while (K < cap && double(K) * K * std::pow(q, 2.0 * K) > target) ++K;
    return K;
}

// ---------------------------------------------------------------------------
// The unitary generator of K_1 and general 2x2 unitaries over the algebra.
struct UnitaryMatrix {
    std::array<std::array<AlgebraElement, 2>, 2> entry;

    static UnitaryMatrix k1_generator(double q) {
        UnitaryMatrix u;
        u.entry[0][0] = AlgebraElement::monomial({1, 0, 0});       // a
        u.entry[0][1] = AlgebraElement::monomial({0, 1, 0});       // b
        u.entry[1][0] = AlgebraElement::monomial({0, 0, 1}, -q);   // -q b*
        u.entry[1][1] = AlgebraElement::monomial({-1, 0, 0});      // a*
        return u;
    }

    UnitaryMatrix adjoint(double q) const {
        UnitaryMatrix r;
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) r.entry[k][l] = alg_star(entry[l][k], q);
        return r;
    }

    // U*U = UU* = 1 as normal forms.
    bool is_unitary(double q, double tol = 1e-12) const {
        UnitaryMatrix us = adjoint(q);
        const UnitaryMatrix* pairs[2][2] = {{&us, this}, {this, &us}};
        for (auto& [y, x] : pairs)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) {
                    AlgebraElement acc;
                    for (int m = 0; m < 2; ++m)
                        acc = acc + alg_mul(y->entry[k][m], x->entry[m][l], q);
                    AlgebraElement expect =
                        k == l ? AlgebraElement::one() : AlgebraElement::zero();
                    if (alg_distance(acc, expect) > tol) return false;
                }
        return true;
    }
};

// ---------------------------------------------------------------------------
// Residue cochains through the symbol calculus.  All are exact in the tau
// closed forms; the only floating error is plain arithmetic.

namespace detail {

inline CosphereElement delta_word_symbol(const AlgebraElement& a0, const AlgebraElement& a1,
                                         int k, double q) {
    return cos_mul(symbol_of_pi(a0, q), cos_delta(symbol_of_pi(a1, q), k), q);
}

inline cplx nc_f(const CosphereElement& s, int k, double q) {
    return nc_integral_up(s, k, q) - nc_integral_dn(s, k, q);
}

}  // namespace detail

struct Psi1Breakdown {
    cplx order1 = 0.0, order2 = 0.0, order3 = 0.0;
    cplx total() const { return order1 + order2 + order3; }
};

// psi_1(a0, a1) = 2 nci a0 d(a1) P|D|^-1 - nci a0 d^2(a1) P|D|^-2
//                 + 2/3 nci a0 d^3(a1) P|D|^-3
inline Psi1Breakdown psi1_terms(const AlgebraElement& a0, const AlgebraElement& a1, double q) {
    Psi1Breakdown t;
    t.order1 = 2.0 * nc_integral_up(detail::delta_word_symbol(a0, a1, 1, q), 1, q);
    t.order2 = -nc_integral_up(detail::delta_word_symbol(a0, a1, 2, q), 2, q);
    t.order3 = (2.0 / 3.0) * nc_integral_up(detail::delta_word_symbol(a0, a1, 3, q), 3, q);
    return t;
}

inline cplx psi1(const AlgebraElement& a0, const AlgebraElement& a1, double q) {
    return psi1_terms(a0, a1, q).total();
}

// Pairing sum over matrix entries: sum_kl psi1(U*_kl, U_lk).
inline Psi1Breakdown psi1_pairing(const UnitaryMatrix& u, double q) {
    Psi1Breakdown acc;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            Psi1Breakdown t = psi1_terms(alg_star(u.entry[l][k], q), u.entry[l][k], q);
            acc.order1 += t.order1;
            acc.order2 += t.order2;
            acc.order3 += t.order3;
        }
    return acc;
}

// The odd local cocycle components, in the F-twisted delta form.
inline cplx phi1_delta(const AlgebraElement& a0, const AlgebraElement& a1, double q) {
    using detail::delta_word_symbol;
    using detail::nc_f;
    return nc_f(delta_word_symbol(a0, a1, 1, q), 1, q) -
           0.5 * nc_f(delta_word_symbol(a0, a1, 2, q), 2, q) +
           0.25 * nc_f(delta_word_symbol(a0, a1, 3, q), 3, q);
}

inline cplx phi3(const AlgebraElement& a0, const AlgebraElement& a1, const AlgebraElement& a2,
                 const AlgebraElement& a3, double q) {
    CosphereElement s = cos_mul(cos_mul(symbol_of_pi(a0, q), cos_delta(symbol_of_pi(a1, q)), q),
                                cos_mul(cos_delta(symbol_of_pi(a2, q)),
                                        cos_delta(symbol_of_pi(a3, q)), q),
                                q);
    return detail::nc_f(s, 3, q) / 12.0;
}

// eta-cochain components and their primed variants.
inline cplx phi2(const AlgebraElement& a0, const AlgebraElement& a1, const AlgebraElement& a2,
                 double q) {
    CosphereElement s = cos_mul(symbol_of_pi(a0, q),
                                cos_mul(cos_delta(symbol_of_pi(a1, q)),
                                        cos_delta(symbol_of_pi(a2, q), 2), q),
                                q);
    return detail::nc_f(s, 3, q) / 24.0;
}

inline cplx phi2_prime(const AlgebraElement& a0, const AlgebraElement& a1,
                       const AlgebraElement& a2, double q) {
    return -phi2(a0, a1, a2, q);
}

inline cplx phi0(const AlgebraElement& a, double q, int max2j = 60) {
    ShiftOperator t = pi_of(a, q);
    return sector_value_at_zero(t, Sector::up, max2j) -
           sector_value_at_zero(t, Sector::dn, max2j);
}

inline cplx phi0_prime(const AlgebraElement& a, double q, int max2j = 60) {
    return zeta_at_zero(pi_of(a, q), Projector::none, max2j);
}

// beta(a) = 2 Tr(P a |D|^{-z}) at z = 0.
inline cplx beta(const AlgebraElement& a, double q, int max2j = 60) {
    return 2.0 * zeta_at_zero(pi_of(a, q), Projector::up, max2j);
}

inline cplx bbeta(const AlgebraElement& a0, const AlgebraElement& a1, double q, int max2j = 60) {
    return beta(alg_mul(a0, a1, q), q, max2j) - beta(alg_mul(a1, a0, q), q, max2j);
}

// Closed forms appearing in the cocycle-identity proofs.
inline cplx connes_B_phi2_prime_closed(const AlgebraElement& a0, const AlgebraElement& a1,
                                       double q) {
    return detail::nc_f(detail::delta_word_symbol(a0, a1, 3, q), 3, q) / 12.0;
}

inline cplx hochschild_b_phi0_prime_closed(const AlgebraElement& a0, const AlgebraElement& a1,
                                           double q) {
    using detail::delta_word_symbol;
    return nc_integral(delta_word_symbol(a0, a1, 1, q), 1, q) -
           0.5 * nc_integral(delta_word_symbol(a0, a1, 2, q), 2, q) +
           (1.0 / 3.0) * nc_integral(delta_word_symbol(a0, a1, 3, q), 3, q);
}

// ---------------------------------------------------------------------------
// The nabla form of phi_1, evaluated numerically from level traces; it pairs
// with the delta form as a cross-check of the residue calculus.
inline cplx residue_total(const ShiftOperator& T, int m, int max_pow, int max2j) {
    return numeric_residue_at(T, m, max_pow, Sector::up, max2j) +
           numeric_residue_at(T, m, max_pow, Sector::dn, max2j);
}

inline cplx phi1_nabla(const AlgebraElement& a0, const AlgebraElement& a1, double q,
                       int max2j = 80) {
    ShiftOperator A0 = pi_of(a0, q);
    ShiftOperator C = commutator_d(pi_of(a1, q));
    cplx t1 = residue_total(A0 * C, 1, 2, max2j);
    cplx t2 = residue_total(A0 * nabla(C), 3, 3, max2j);
    cplx t3 = residue_total(A0 * nabla(nabla(C)), 5, 4, max2j);
    return t1 - 0.25 * t2 + 0.125 * t3;
}

// Numeric-residue evaluation of psi_1 through up-sector level fits.
inline cplx psi1_numeric(const AlgebraElement& a0, const AlgebraElement& a1, double q,
                         int max2j = 60) {
    ShiftOperator A0 = pi_of(a0, q);
    ShiftOperator A1 = pi_of(a1, q);
    auto up_fit = [&](const ShiftOperator& X) {
        return fit_sector(sector_level_traces(X, Sector::up, max2j), 1.5);
    };
    cplx t1 = 2.0 * up_fit(A0 * delta(A1)).c0;
    cplx t2 = -up_fit(A0 * delta_pow(A1, 2)).c1;
    cplx t3 = (2.0 / 3.0) * up_fit(A0 * delta_pow(A1, 3)).c2;
    return t1 + t2 + t3;
}

// ---------------------------------------------------------------------------
// chi_1(a0, a1) = Tr(a0 [F, a1]), convergent since [F, pi(x)] has rapid decay.
inline ShiftOperator f_commutator(const ShiftOperator& T) {
    return T.scaled_entrywise([](HalfInt, Spin t, HalfInt, Spin s) {
        double ft = t == Spin::up ? 1.0 : -1.0;
        double fs = s == Spin::up ? 1.0 : -1.0;
        return ft - fs;
    });
}

inline cplx chi1_numeric(const AlgebraElement& a0, const AlgebraElement& a1, double q,
                         int max2j = 60) {
    ShiftOperator X = pi_of(a0, q) * f_commutator(pi_of(a1, q));
    cplx half_sum = 0.0, full_sum = 0.0;
    for (int k = 0; k <= max2j; ++k) {
        full_sum += level_trace(X, k, Sector::both);
        if (k == max2j / 2) half_sum = full_sum;
    }
    if (std::abs(full_sum - half_sum) > 1e-8 * (std::abs(full_sum) + 1.0))
        throw ConvergenceError("chi1_numeric: trace has not settled across the 2J ladder");
    return full_sum;
}

inline cplx chi1_pairing(const UnitaryMatrix& u, double q, int max2j = 60) {
    cplx acc = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            acc += chi1_numeric(alg_star(u.entry[l][k], q), u.entry[l][k], q, max2j);
    return acc;
}

// ---------------------------------------------------------------------------
// The generating cyclic 1-cocycle of HC^1 as a closed form on the PBW
// basis; the l < 0 sector is fixed by cyclicity.
inline cplx tau_odd_mono(const AlgMono& m1, const AlgMono& m2, double q) {
    if (m1.n + m2.n != m1.m + m2.m || m1.l != -m2.l) return 0.0;
    if (m1.l < 0) {
        // lambda tau = tau for a 1-cochain reads tau(x, y) = -tau(y, x)
        AlgMono s1 = m2, s2 = m1;
        return -tau_odd_mono(s1, s2, q);
    }
    // the n - m prefactor kills exactly the cases with a vanishing
    // denominator factor (all exponents zero)
    if (m1.n == m1.m) return 0.0;
    int l = m1.l;
    double num = 1.0;
    for (int i = 1; i <= l; ++i) num *= 1.0 - std::pow(q, 2.0 * i);
    double den = 1.0;
    for (int i = 0; i <= l; ++i) den *= 1.0 - std::pow(q, 2.0 * i + 2.0 * (m1.n + m2.n));
    return double(m1.n - m1.m) * std::pow(q, double(l) * (m2.m + m2.n)) * num / den;
}

inline cplx tau_odd(const AlgebraElement& x, const AlgebraElement& y, double q) {
    cplx acc = 0.0;
    for (auto& [mx, cx] : x.terms)
        for (auto& [my, cy] : y.terms) acc += cx * cy * tau_odd_mono(mx, my, q);
    return acc;
}

// ---------------------------------------------------------------------------
// Fredholm index by kernel dimensions of PUP and PU*P on the doubled space.
struct KernelReport {
    int dim_ker_u = 0;
    int dim_ker_u_star = 0;
    int index = 0;
    double gap_u = 0.0;       // ratio of bracketing singular values
    double gap_u_star = 0.0;
    bool gap_warning = false;
    Eigen::VectorXcd kernel_vector;  // of PUP, when one-dimensional or more
    std::vector<std::size_t> up_kets;  // space indices of the up basis
};

namespace detail {

// Rectangular section of P X(u) P on (up kets) x C^2: the domain stops one
// level below the cut so every generator amplitude stays inside the row
// space and the section has no truncation-induced kernel.  Block (i, l)
// holds U_{il}.
inline Eigen::MatrixXcd compress_up(const UnitaryMatrix& u, const TruncatedSpace& space,
                                    double q, std::vector<std::size_t>& domain_kets) {
    domain_kets.clear();
    std::vector<int> row_compact(space.dimension(), -1);
    std::size_t rows = 0;
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        SpinKet k = space.ket_at(i);
        if (k.spin != Spin::up) continue;
        row_compact[i] = int(rows++);
        if (k.j.twice <= space.max2j() - 1) domain_kets.push_back(i);
    }
    const int ncols = int(domain_kets.size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * int(rows), 2 * ncols);
    std::array<std::array<ShiftOperator, 2>, 2> ops;
    for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l) ops[i][l] = pi_of(u.entry[i][l], q);
    for (int col = 0; col < ncols; ++col) {
        SpinKet src = space.ket_at(domain_kets[col]);
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                for (auto& [dst, amp] : ops[i][l].column(src)) {
                    if (dst.spin != Spin::up) continue;
                    auto row = space.index_of(dst);
                    if (!row || row_compact[*row] < 0) continue;
                    m(2 * row_compact[*row] + i, 2 * col + l) += amp;
                }
    }
    return m;
}

}  // namespace detail

inline KernelReport fredholm_index_kernel(const UnitaryMatrix& u, int max2j, double tol,
                                          double q) {
    if (max2j < 4) throw std::invalid_argument("fredholm_index_kernel: need 2J >= 4");
    if (!u.is_unitary(q)) throw std::invalid_argument("fredholm_index_kernel: input not unitary");
    TruncatedSpace space(max2j);
    KernelReport rep;

    auto svd_count = [&](const UnitaryMatrix& m, double& gap, Eigen::VectorXcd* kernel) {
        Eigen::MatrixXcd mat = detail::compress_up(m, space, q, rep.up_kets);
        Eigen::BDCSVD<Eigen::MatrixXcd> svd(mat, Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        int small = 0;
        for (int i = 0; i < sv.size(); ++i)
            if (sv[i] < tol) ++small;
        if (small > 0) {
            double first_kept = small < sv.size() ? sv[sv.size() - small - 1] : 1.0;
            double last_dropped = sv[sv.size() - small];
            gap = last_dropped > 0 ? first_kept / last_dropped : 1e300;
            if (kernel && small >= 1) *kernel = svd.matrixV().col(sv.size() - 1);
        } else {
            gap = sv[sv.size() - 1] / tol;
        }
        return small;
    };

    rep.dim_ker_u = svd_count(u, rep.gap_u, &rep.kernel_vector);
    rep.dim_ker_u_star = svd_count(u.adjoint(q), rep.gap_u_star, nullptr);
    rep.index = rep.dim_ker_u - rep.dim_ker_u_star;
    rep.gap_warning = rep.gap_u < 10.0 || rep.gap_u_star < 10.0;
    return rep;
}

// Index by the parametrix trace formula
//   ind(PUP) = Tr(P - PU*PUP) - Tr(P - PUPU*P),
// evaluated as the difference of Hilbert-Schmidt norms of the off-corners.
inline double fredholm_index_trace(const UnitaryMatrix& u, int max2j, double q) {
    if (!u.is_unitary(q)) throw std::invalid_argument("fredholm_index_trace: input not unitary");
    std::array<std::array<ShiftOperator, 2>, 2> opsU, opsUs;
    UnitaryMatrix us = u.adjoint(q);
    for (int i = 0; i < 2; ++i)
        for (int l = 0; l < 2; ++l) {
            opsU[i][l] = pi_of(u.entry[i][l], q);
            opsUs[i][l] = pi_of(us.entry[i][l], q);
        }
    auto hs2_level = [&](std::array<std::array<ShiftOperator, 2>, 2>& ops, int k) {
        double acc = 0;
        HalfInt j = HalfInt::from_twice(k);
        for (int mu2 = -k; mu2 <= k; mu2 += 2)
            for (int n2 = -(k + 1); n2 <= k + 1; n2 += 2) {
                SpinKet src{j, HalfInt::from_twice(mu2), HalfInt::from_twice(n2), Spin::up};
                if (!valid_ket(src)) continue;
                for (int l = 0; l < 2; ++l)
                    for (int i = 0; i < 2; ++i)
                        for (auto& [dst, amp] : ops[i][l].column(src))
                            if (dst.spin == Spin::dn) acc += std::norm(amp);
            }
        return acc;
    };
    double total = 0, half = 0;
    for (int k = 0; k <= max2j; ++k) {
        total += hs2_level(opsU, k) - hs2_level(opsUs, k);
        if (k == max2j / 2) half = total;
    }
    if (std::abs(total - half) > 1e-6 * (std::abs(total) + 1.0))
        throw ConvergenceError("fredholm_index_trace: ladder has not settled");
    return total;
}

// ---------------------------------------------------------------------------
struct PairingReport {
    double q = 0.5;
    int max2j = 40;
    Psi1Breakdown psi1_breakdown;          // closed-form residue pieces
    cplx psi1_value = 0.0;                 // sum over the matrix entries
    cplx psi1_numeric_value = 0.0;         // level-fit route
    cplx chi1_value = 0.0;                 // Tr(U*_kl [F, U_lk]) summed
    cplx bbeta_total = 0.0;                // coboundary term, cancels in the pairing
    int index_kernel = 0;
    double index_trace = 0.0;
    double kernel_overlap = 0.0;           // against the closed-form kernel vector
    int dim_ker_u = 0, dim_ker_u_star = 0;
};

inline PairingReport pairing_report(double q, int max2j) {
    PairingReport rep;
    rep.q = q;
    rep.max2j = max2j;
    UnitaryMatrix u = UnitaryMatrix::k1_generator(q);

    rep.psi1_breakdown = psi1_pairing(u, q);
    rep.psi1_value = rep.psi1_breakdown.total();

    cplx num = 0.0;
    int Knum = psi_numeric_levels(q, std::max(40, max2j));
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            num += psi1_numeric(alg_star(u.entry[l][k], q), u.entry[l][k], q, Knum);
    rep.psi1_numeric_value = num;

    rep.chi1_value = chi1_pairing(u, q, rapid_decay_levels(q, std::max(40, max2j)));

    cplx bb = 0.0;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
            bb += bbeta(alg_star(u.entry[l][k], q), u.entry[l][k], q, std::max(40, max2j));
    rep.bbeta_total = bb;

    KernelReport kr = fredholm_index_kernel(u, std::min(max2j, 8), 1e-8, q);
    rep.index_kernel = kr.index;
    rep.dim_ker_u = kr.dim_ker_u;
    rep.dim_ker_u_star = kr.dim_ker_u_star;

    // overlap with (|0,0,-1/2,up>, -q^{-1} |0,0,1/2,up>) / norm
    if (kr.dim_ker_u >= 1) {
        TruncatedSpace space(std::min(max2j, 8));
        Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(kr.kernel_vector.size());
        std::vector<int> compact(space.dimension(), -1);
        for (std::size_t i = 0; i < kr.up_kets.size(); ++i) compact[kr.up_kets[i]] = int(i);
        SpinKet k0{HalfInt(0), HalfInt(0), HalfInt::from_twice(-1), Spin::up};
        SpinKet k1{HalfInt(0), HalfInt(0), HalfInt::from_twice(1), Spin::up};
        expect[2 * compact[int(*space.index_of(k0))] + 0] = 1.0;
        expect[2 * compact[int(*space.index_of(k1))] + 1] = -1.0 / q;
        expect.normalize();
        rep.kernel_overlap = std::abs(expect.dot(kr.kernel_vector));
    }

    rep.index_trace = fredholm_index_trace(u, rapid_decay_levels(q, std::max(40, max2j)), q);
    return rep;
}

}  // namespace suq2
