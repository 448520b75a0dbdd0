#pragma once

// Trace functionals on the disks, the noncommutative integral at orders
// 1, 2, 3 with its up/down compressions, truncated-trace fitting, and the
// regularized value at z = 0.

#include <Eigen/SparseCore>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <optional>
#include <stdexcept>
#include <vector>

#include "suq2/fock.hpp"
#include "suq2/qnum.hpp"
#include "suq2/spectral.hpp"
#include "suq2/symbols.hpp"

namespace suq2 {

// ---------------------------------------------------------------------------
// pi(x) for a normal-form algebra element, as a symbolic shift operator.
inline ShiftOperator pi_of(const AlgebraElement& x, double q) {
    auto gen = [&](Gen g) { return spin_rep(g, q); };
    ShiftOperator acc = ShiftOperator::zero();
    for (auto& [m, c] : x.terms) {
        ShiftOperator t = ShiftOperator::identity();
        for (int i = 0; i < std::abs(m.l); ++i) t = t * gen(m.l > 0 ? Gen::a : Gen::a_star);
        for (int i = 0; i < m.m; ++i) t = t * gen(Gen::b);
        for (int i = 0; i < m.n; ++i) t = t * gen(Gen::b_star);
        acc = acc + t * c;
    }
    return acc;
}

// Spin-diagonal compression P^u T P^u + P^d T P^d.
inline ShiftOperator spin_diag(const ShiftOperator& T) {
    return T.left_diag(proj_up()).right_diag(proj_up()) +
           T.left_diag(proj_dn()).right_diag(proj_dn());
}

// ---------------------------------------------------------------------------
// Disk representations on l^2(N): pi_pm(a) raises with sqrt(1-q^{2x+2}),
// pi_pm(b) is diagonal +-q^x.

// Amplitude and target of a disk monomial a^k b^m applied to basis vector x.
inline std::pair<int, double> disk_mono_amp(const DiskMono& mono, int x, DiskSide side, double q) {
    double amp = std::pow(q, double(x) * mono.m);
    if (side == DiskSide::minus && mono.m % 2 == 1) amp = -amp;
    int target = x;
    if (mono.k >= 0) {
        for (int i = 1; i <= mono.k; ++i) amp *= std::sqrt(1.0 - std::pow(q, 2.0 * (x + i)));
        target = x + mono.k;
    } else {
        for (int i = 0; i < -mono.k; ++i) {
            if (x - i <= 0) return {0, 0.0};  // lowering annihilates the vacuum
            amp *= std::sqrt(1.0 - std::pow(q, 2.0 * (x - i)));
        }
        target = x + mono.k;
    }
    return {target, amp};
}

inline Eigen::SparseMatrix<cplx> disk_rep(DiskSide side, const DiskElement& x, int cutoff,
                                          double q) {
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int col = 0; col <= cutoff; ++col)
        for (auto& [mono, c] : x.terms) {
            auto [row, amp] = disk_mono_amp(mono, col, side, q);
            if (amp == 0.0 || row > cutoff) continue;
            trips.emplace_back(row, col, c * amp);
        }
    Eigen::SparseMatrix<cplx> m(cutoff + 1, cutoff + 1);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

// ---------------------------------------------------------------------------
// Closed-form trace functionals.
struct TauValue {
    cplx tau1 = 0.0, tau0_up = 0.0, tau0_dn = 0.0;
};

enum class TauKind { t1, t0_up, t0_dn };

inline double tau_mono(const DiskMono& m, TauKind kind, DiskSide side, double q) {
    if (m.k != 0) return 0.0;
    if (m.m == 0) {
        switch (kind) {
            case TauKind::t1: return 1.0;
            case TauKind::t0_up: return -0.5;
            case TauKind::t0_dn: return 0.5;
        }
    }
    if (kind == TauKind::t1) return 0.0;
    double sign = (side == DiskSide::minus && m.m % 2 == 1) ? -1.0 : 1.0;
    return sign / (1.0 - std::pow(q, double(m.m)));
}

inline TauValue tau_closed(const DiskElement& x, DiskSide side, double q) {
    TauValue v;
    for (auto& [m, c] : x.terms) {
        v.tau1 += c * tau_mono(m, TauKind::t1, side, q);
        v.tau0_up += c * tau_mono(m, TauKind::t0_up, side, q);
        v.tau0_dn += c * tau_mono(m, TauKind::t0_dn, side, q);
    }
    return v;
}

struct FitInstabilityError : std::runtime_error {
    explicit FitInstabilityError(const std::string& m) : std::runtime_error(m) {}
};

// Truncated-trace sweep Tr_N over the disk representation; the slope gives
// tau_1 and one sweep yields both intercept conventions (N+3/2 and N+1/2).
inline TauValue tau_numeric(const DiskElement& x, DiskSide side, int n_max, double q) {
    std::vector<cplx> tr(n_max + 1);
    cplx run = 0.0;
    for (int pos = 0; pos <= n_max; ++pos) {
        for (auto& [mono, c] : x.terms) {
            if (mono.k != 0) continue;
            double d = std::pow(q, double(pos) * mono.m);
            if (side == DiskSide::minus && mono.m % 2 == 1) d = -d;
            run += c * d;
        }
        tr[pos] = run;
    }
    // slope from the last-quarter increments, where geometric corrections
    // have died off; the intercepts both come from the endpoint
    int lo = std::max(1, 3 * n_max / 4);
    cplx slope = 0.0;
    for (int N = lo; N <= n_max; ++N) slope += tr[N] - tr[N - 1];
    slope /= double(n_max - lo + 1);

    double scale = 0, dev = 0;
    for (int N = lo; N <= n_max; ++N) {
        dev = std::max(dev, std::abs(tr[N] - tr[N - 1] - slope));
        scale = std::max(scale, std::abs(tr[N]));
    }
    if (dev > 1e-10 * (scale + 1.0))
        throw FitInstabilityError("tau_numeric: truncated traces are not asymptotically linear");

    TauValue v;
    v.tau1 = slope;
    v.tau0_up = tr[n_max] - slope * (n_max + 1.5);
    v.tau0_dn = tr[n_max] - slope * (n_max + 0.5);
    return v;
}

// ---------------------------------------------------------------------------
// The residue functionals of the dimension-spectrum theorem.  All act on the
// degree-zero part of a cosphere symbol through tau x tau pairings, with the
// first leg on the + disk and the second on the - disk.

inline cplx tau_pair(const CosphereElement& sym, TauKind first, TauKind second, double q) {
    cplx acc = 0.0;
    for (auto& [m, c] : sym.terms) {
        if (m.w != 0) continue;  // restriction r drops the circle leg
        acc += c * tau_mono(m.plus, first, DiskSide::plus, q) *
               tau_mono(m.minus, second, DiskSide::minus, q);
    }
    return acc;
}

inline cplx nc_integral(const CosphereElement& sym, int k, double q) {
    switch (k) {
        case 3: return 2.0 * tau_pair(sym, TauKind::t1, TauKind::t1, q);
        case 2:
            return tau_pair(sym, TauKind::t1, TauKind::t0_up, q) +
                   tau_pair(sym, TauKind::t1, TauKind::t0_dn, q) +
                   tau_pair(sym, TauKind::t0_up, TauKind::t1, q) +
                   tau_pair(sym, TauKind::t0_dn, TauKind::t1, q);
        case 1:
            return tau_pair(sym, TauKind::t0_up, TauKind::t0_dn, q) +
                   tau_pair(sym, TauKind::t0_dn, TauKind::t0_up, q);
    }
    throw std::invalid_argument("nc_integral: order k must be 1, 2 or 3");
}

inline cplx nc_integral_up(const CosphereElement& sym, int k, double q) {
    switch (k) {
        case 3: return tau_pair(sym, TauKind::t1, TauKind::t1, q);
        case 2:
            return tau_pair(sym, TauKind::t1, TauKind::t0_dn, q) +
                   tau_pair(sym, TauKind::t0_up, TauKind::t1, q);
        case 1: return tau_pair(sym, TauKind::t0_up, TauKind::t0_dn, q);
    }
    throw std::invalid_argument("nc_integral_up: order k must be 1, 2 or 3");
}

inline cplx nc_integral_dn(const CosphereElement& sym, int k, double q) {
    switch (k) {
        case 3: return tau_pair(sym, TauKind::t1, TauKind::t1, q);
        case 2:
            return tau_pair(sym, TauKind::t1, TauKind::t0_up, q) +
                   tau_pair(sym, TauKind::t0_dn, TauKind::t1, q);
        case 1: return tau_pair(sym, TauKind::t0_dn, TauKind::t0_up, q);
    }
    throw std::invalid_argument("nc_integral_dn: order k must be 1, 2 or 3");
}

inline cplx nc_integral(const AlgebraElement& x, int k, double q) {
    return nc_integral(symbol_of_pi(x, q), k, q);
}

// ---------------------------------------------------------------------------
// Numeric residues from per-level traces of the operator itself.

// Per-level traces of one spin sector, reindexed so both sectors share the
// offset 3/2 (the down sector starts at 2j = 1 with |D| eigenvalue 3/2).
inline std::vector<cplx> sector_level_traces(const ShiftOperator& T, Sector sector, int max2j) {
    std::vector<cplx> t;
    if (sector == Sector::up)
        for (int k = 0; k <= max2j; ++k) t.push_back(level_trace(T, k, Sector::up));
    else
        for (int k = 1; k <= max2j; ++k) t.push_back(level_trace(T, k, Sector::dn));
    return t;
}

struct SectorWeights {
    cplx c2 = 0.0, c1 = 0.0, c0 = 0.0, f0 = 0.0;
};

// Extended mode runs the residue extraction at 50 significant digits; the
// level traces themselves are binary64 either way.
enum class FitPrecision { standard, extended };

template <typename Real>
SectorWeights fit_sector_as(const std::vector<cplx>& t, double offset) {
    std::vector<Real> re(t.size()), im(t.size());
    double scale = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        re[i] = Real(t[i].real());
        im[i] = Real(t[i].imag());
        scale = std::max(scale, std::abs(t[i]));
    }
    // level traces sum O(h^2) kets, so their rounding noise grows with the
    // window even when the trace itself stays small
    double hmax = offset + double(t.size());
    double noise_floor = 1e-13 * (hmax * hmax + scale);
    auto wr = residue_weights<Real>(re, Real(offset), noise_floor);
    auto wi = residue_weights<Real>(im, Real(offset), noise_floor);
    return {cplx(double(wr.c2), double(wi.c2)), cplx(double(wr.c1), double(wi.c1)),
            cplx(double(wr.c0), double(wi.c0)), cplx(double(wr.f0), double(wi.f0))};
}

inline SectorWeights fit_sector(const std::vector<cplx>& t, double offset,
                                FitPrecision prec = FitPrecision::standard) {
    // long double by default: the f0 remainder sum amplifies coefficient
    // error by the window length squared
    if (prec == FitPrecision::extended)
        return fit_sector_as<boost::multiprecision::cpp_bin_float_50>(t, offset);
    return fit_sector_as<long double>(t, offset);
}

struct ResidueTriple {
    cplx res3 = 0.0, res2 = 0.0, res1 = 0.0;
    std::optional<cplx> value_at_0;
};

inline ResidueTriple numeric_residues(const ShiftOperator& T, int max2j,
                                      FitPrecision prec = FitPrecision::standard) {
    auto up = fit_sector(sector_level_traces(T, Sector::up, max2j), 1.5, prec);
    auto dn = fit_sector(sector_level_traces(T, Sector::dn, max2j), 1.5, prec);
    ResidueTriple r;
    r.res3 = up.c2 + dn.c2;
    r.res2 = up.c1 + dn.c1;
    r.res1 = up.c0 + dn.c0;
    r.value_at_0 = up.f0 + dn.f0;
    return r;
}

// Regularized trace at z = 0 for one sector.
inline cplx sector_value_at_zero(const ShiftOperator& T, Sector sector, int max2j,
                                 FitPrecision prec = FitPrecision::standard) {
    return fit_sector(sector_level_traces(T, sector, max2j), 1.5, prec).f0;
}

enum class Projector { none, up };

// Tr((P)T |D|^{-z}) evaluated at z = 0 through the quadratic Hurwitz split.
inline cplx zeta_at_zero(const ShiftOperator& T, Projector p, int max2j = 60,
                         FitPrecision prec = FitPrecision::standard) {
    if (p == Projector::up) return sector_value_at_zero(T, Sector::up, max2j, prec);
    return sector_value_at_zero(T, Sector::up, max2j, prec) +
           sector_value_at_zero(T, Sector::dn, max2j, prec);
}

// Residue of Tr(T |D|^{-z}) at z = m from a degree-d polynomial level fit;
// used for operators of order above zero, where the quadratic ansatz is too
// small.  The residue at m is the coefficient of h^{m-1}.
inline cplx numeric_residue_at(const ShiftOperator& T, int m, int degree, Sector sector,
                               int max2j) {
    auto t = sector_level_traces(T, sector, max2j);
    std::vector<double> re(t.size()), im(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        re[i] = t[i].real();
        im[i] = t[i].imag();
    }
    if (m - 1 > degree) return 0.0;
    auto cr = level_polynomial_fit(re, 1.5, degree);
    auto ci = level_polynomial_fit(im, 1.5, degree);
    return {cr[m - 1], ci[m - 1]};
}

// ---------------------------------------------------------------------------
// Materialize a cosphere symbol on the truncated spinor space: the two disk
// legs act on x and y, the winding shifts 2j, spin is preserved.
inline Eigen::SparseMatrix<cplx> materialize_symbol(const CosphereElement& sym,
                                                    const TruncatedSpace& space, double q) {
    std::vector<Eigen::Triplet<cplx>> trips;
    for (std::size_t col = 0; col < space.dimension(); ++col) {
        SpinKet ket = space.ket_at(col);
        XYKet v = to_xy(ket);
        for (auto& [m, c] : sym.terms) {
            auto [xt, ampx] = disk_mono_amp(m.plus, v.x, DiskSide::plus, q);
            if (ampx == 0.0) continue;
            auto [yt, ampy] = disk_mono_amp(m.minus, v.y, DiskSide::minus, q);
            if (ampy == 0.0) continue;
            XYKet w;
            w.j = HalfInt::from_twice(ket.j.twice + m.w);
            w.x = xt;
            w.y = yt;
            w.spin = ket.spin;
            if (w.j.twice < 0 || w.x > w.j.twice ||
                w.y > (w.spin == Spin::up ? w.j.twice + 1 : w.j.twice - 1))
                continue;  // compression onto the valid lattice
            auto row = space.index_of(from_xy(w));
            if (!row) continue;
            trips.emplace_back(int(*row), int(col), c * ampx * ampy);
        }
    }
    Eigen::SparseMatrix<cplx> out(int(space.dimension()), int(space.dimension()));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

}  // namespace suq2
