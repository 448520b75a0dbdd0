#pragma once

// Verification campaigns: run configuration, per-check rows with pinned
// tolerances, the eight suites, and byte-stable serialization.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "suq2/cyclic.hpp"
#include "suq2/parallel.hpp"

namespace suq2 {

struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& m) : std::invalid_argument(m) {}
};

enum class PrecisionMode { standard, extended };
enum class OutputFormat { json, csv, text };

struct RunConfig {
    double q = 0.5;
    int max2j = 40;
    double tol_kernel = 1e-8;
    double tol_check = 1e-6;
    PrecisionMode precision = PrecisionMode::standard;
    OutputFormat output = OutputFormat::text;
    unsigned seed = 2024;
    int threads = 1;
    bool strict_truncation = false;
    std::string out_file;

    void validate() const {
        if (!(q > 0.0 && q < 1.0)) throw ConfigError("q must satisfy 0 < q < 1");
        if (max2j < 4) throw ConfigError("max-2j must be at least 4 (interior region empty)");
        if (!(tol_kernel > 0.0) || !(tol_check > 0.0)) throw ConfigError("tolerances must be positive");
        if (threads < 1) throw ConfigError("threads must be >= 1");
    }
};

struct CheckRow {
    std::string name;
    std::string anchor;   // the mathematical claim the check pins down
    double target = 0.0;
    double computed = 0.0;
    double residual = 0.0;
    bool pass = false;
    double wall_ms = 0.0;  // measured, never serialized
};

using Report = std::vector<CheckRow>;

namespace detail_report {

inline CheckRow value_row(std::string name, std::string anchor, double target, double computed,
                          double tol) {
    CheckRow r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.target = target;
    r.computed = computed;
    r.residual = std::abs(computed - target);
    r.pass = r.residual < tol;
    return r;
}

inline CheckRow bound_row(std::string name, std::string anchor, double bound, double computed) {
    CheckRow r;
    r.name = std::move(name);
    r.anchor = std::move(anchor);
    r.target = bound;
    r.computed = computed;
    r.residual = std::max(0.0, computed - bound);
    r.pass = computed <= bound;
    return r;
}

inline double column_sup(const ShiftOperator& op, const SpinKet& src) {
    double sup = 0;
    for (auto& [dst, amp] : op.column(src)) sup = std::max(sup, std::abs(amp));
    return sup;
}

// max |amplitude| of op over all source kets at one level
inline double level_residual(const ShiftOperator& op, int k) { return level_sup_entry(op, k); }

}  // namespace detail_report

// ---------------------------------------------------------------------------
// Suites.

inline Report relations_suite(const RunConfig& cfg) {
    using namespace detail_report;
    const double q = cfg.q;
    Report rows;
    ShiftOperator A = spin_rep(Gen::a, q), As = spin_rep(Gen::a_star, q);
    ShiftOperator B = spin_rep(Gen::b, q), Bs = spin_rep(Gen::b_star, q);
    ShiftOperator one = ShiftOperator::identity();

    std::vector<std::pair<std::string, ShiftOperator>> rels = {
        {"ba = q ab", B * A - q * (A * B)},
        {"b*a = q ab*", Bs * A - q * (A * Bs)},
        {"bb* = b*b", B * Bs - Bs * B},
        {"a*a + q^2 b*b = 1", As * A + (q * q) * (Bs * B) - one},
        {"aa* + bb* = 1", A * As + B * Bs - one},
    };
    const int interior = cfg.max2j - 2;
    for (auto& [name, resid] : rels) {
        auto per_level = parallel_map_indexed<double>(
            interior + 1, cfg.threads, [&](int k) { return level_residual(resid, k); });
        double sup = 0;
        for (double v : per_level) sup = std::max(sup, v);
        rows.push_back(value_row("relation " + name, name, 0.0, sup, 1e-12));
    }

    // adjoint consistency as materialized matrices
    {
        TruncatedSpace sp(std::min(cfg.max2j, 12));
        double sup = 0;
        bool truncated = false;
        try {
            auto policy = cfg.strict_truncation ? TruncationPolicy::strict : TruncationPolicy::drop;
            SparseMat ma = materialize(A, sp, policy);
            SparseMat mas = materialize(As, sp, policy);
            SparseMat diff = SparseMat(ma.adjoint()) - mas;
            for (int c = 0; c < diff.outerSize(); ++c)
                for (SparseMat::InnerIterator it(diff, c); it; ++it)
                    sup = std::max(sup, std::abs(it.value()));
        } catch (const TruncationError&) {
            truncated = true;
            sup = 1.0;
        }
        CheckRow r = value_row("adjoint consistency pi(a)^dag = pi(a*)", "*-representation", 0.0,
                               sup, 1e-13);
        if (truncated) r.pass = false;
        rows.push_back(r);
    }

    // boundary coefficients of the signed halves vanish analytically
    {
        double worst = 0;
        for (Gen g : {Gen::a_plus, Gen::a_minus, Gen::b_plus, Gen::b_minus}) {
            auto [sh, raw] = spin_rep_raw(g, q);
            for (int k = 0; k <= 8; ++k)
                for (int mu2 = -k; mu2 <= k; mu2 += 2)
                    for (int n2 = -(k + 1); n2 <= k + 1; n2 += 2)
                        for (int s = 0; s < 2; ++s) {
                            SpinKet src{HalfInt::from_twice(k), HalfInt::from_twice(mu2),
                                        HalfInt::from_twice(n2), Spin(s)};
                            if (!valid_ket(src)) continue;
                            Mat2 v = raw(src.j, src.mu, src.n);
                            for (int t = 0; t < 2; ++t) {
                                SpinKet dst{src.j + sh.dj, src.mu + sh.dmu, src.n + sh.dn, Spin(t)};
                                if (!valid_ket(dst))
                                    worst = std::max(worst, std::abs(v.m[t][s]));
                            }
                        }
        }
        rows.push_back(value_row("boundary coefficients vanish", "validity preservation", 0.0,
                                 worst, 1e-14));
    }
    return rows;
}

inline Report smoothing_suite(const RunConfig& cfg) {
    using namespace detail_report;
    const double q = cfg.q;
    Report rows;
    const char* names[] = {"a", "b", "a*", "b*"};
    Gen gens[] = {Gen::a, Gen::b, Gen::a_star, Gen::b_star};
    for (int gi = 0; gi < 4; ++gi) {
        ShiftOperator diff = spin_rep(gens[gi], q) - approx_rep(gens[gi], q);
        ShiftOperator amplified = diff.right_diag(abs_dirac_pow(5.0));
        auto sup = parallel_map_indexed<double>(11, cfg.threads, [&](int i) {
            return level_sup_entry(amplified, 10 + 2 * i);  // levels 10..30
        });
        double worst_ratio = 0;
        for (std::size_t i = 1; i < sup.size(); ++i)
            worst_ratio = std::max(worst_ratio, sup[i] / sup[i - 1]);
        rows.push_back(bound_row(std::string("smoothing monotone decay (pi-pi_approx)|D|^5 ") +
                                     names[gi],
                                 "smoothing order", 1.0, worst_ratio));

        // the bare difference profile decays at least as fast as q^{2j}
        double worst_growth = 0;
        double prev = level_sup_entry(diff, 6) / std::pow(q, 6.0);
        for (int k = 10; k <= 30; k += 4) {
            double cur = level_sup_entry(diff, k) / std::pow(q, double(k));
            worst_growth = std::max(worst_growth, cur / prev);
            prev = cur;
        }
        rows.push_back(bound_row(std::string("difference profile <= C q^{2j} ") + names[gi],
                                 "rapid decay of pi - pi_approx", 1.05, worst_growth));

        double worst_k = 0;
        for (int kk = 1; kk <= 5; ++kk) {
            ShiftOperator amp = diff.right_diag(abs_dirac_pow(double(kk)));
            worst_k = std::max(worst_k, level_sup_entry(amp, 26) /
                                            std::max(level_sup_entry(amp, 10), 1e-300));
        }
        rows.push_back(bound_row(std::string("difference times |D|^k shrinks, k <= 5, ") +
                                     names[gi],
                                 "smoothing ideal membership", 1.0, worst_k));
    }
    return rows;
}

inline Report symbols_suite(const RunConfig& cfg) {
    using namespace detail_report;
    const double q = cfg.q;
    Report rows;
    std::mt19937_64 rng(cfg.seed);

    // rho is a *-homomorphism on 200 sampled B-pairs
    {
        std::uniform_int_distribution<int> len(1, 3), pickg(0, 5), st(0, 1), coeff(-3, 3);
        auto random_b = [&]() {
            BWord w(len(rng));
            for (auto& s : w) s = BSym{BGen(pickg(rng)), st(rng) == 1};
            return BElement::word(w, cplx(double(coeff(rng)), double(coeff(rng))));
        };
        double worst_mul = 0, worst_star = 0;
        for (int t = 0; t < 200; ++t) {
            BElement x = random_b(), y = random_b();
            worst_mul = std::max(worst_mul, cosphere_distance(rho(b_mul(x, y), q),
                                                              cos_mul(rho(x, q), rho(y, q), q)));
            worst_star =
                std::max(worst_star, cosphere_distance(rho(b_star(x), q), cos_star(rho(x, q), q)));
        }
        rows.push_back(value_row("rho multiplicative on 200 pairs", "symbol homomorphism", 0.0,
                                 worst_mul, 1e-12));
        rows.push_back(value_row("rho star-compatible on 200 pairs", "symbol homomorphism", 0.0,
                                 worst_star, 1e-12));
    }

    // the degree-0 symbol of U* delta(U)
    {
        UnitaryMatrix u = UnitaryMatrix::k1_generator(q);
        CosphereElement acc = CosphereElement::zero();
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) {
                const AlgebraElement& e = u.entry[l][k];
                acc = acc + degree0(cos_mul(symbol_of_pi(alg_star(e, q), q),
                                            cos_delta(symbol_of_pi(e, q)), q));
            }
        CosphereElement expect =
            CosphereElement::monomial({{0, 0}, {0, 2}, 0}, 2.0 * (1.0 - q * q));
        rows.push_back(value_row("degree-0 symbol of U* delta(U) = 2(1-q^2) 1 x b^2",
                                 "index pairing symbol", 0.0, cosphere_distance(acc, expect),
                                 1e-12));
    }

    // normal form is multiplicative on 200 sampled word pairs
    {
        std::uniform_int_distribution<int> len(0, 4), pickg(0, 3);
        auto random_word = [&]() {
            std::vector<AGen> w(len(rng));
            for (auto& g : w) g = AGen(pickg(rng));
            return w;
        };
        double worst = 0;
        for (int t = 0; t < 200; ++t) {
            auto wx = random_word(), wy = random_word();
            auto concat = wx;
            concat.insert(concat.end(), wy.begin(), wy.end());
            worst = std::max(worst, alg_distance(alg_mul(normal_form(wx, q), normal_form(wy, q), q),
                                                 normal_form(concat, q)));
        }
        rows.push_back(value_row("normal form multiplicative on 200 pairs", "PBW rewriting", 0.0,
                                 worst, 1e-12));
    }

    // operator-symbol consistency on the truncated space
    {
        const int cut = 30;
        TruncatedSpace sp(cut);
        double worst = 0;
        for (Gen g : {Gen::a, Gen::b, Gen::a_star, Gen::b_star}) {
            AGen ag = g == Gen::a        ? AGen::a
                      : g == Gen::b      ? AGen::b
                      : g == Gen::a_star ? AGen::a_star
                                         : AGen::b_star;
            AlgebraElement x = AlgebraElement::monomial(generator_mono(ag));
            SparseMat sym_m = materialize_symbol(symbol_of_pi(x, q), sp, q);
            SparseMat diag_m = materialize(spin_diag(pi_of(x, q)), sp);
            SparseMat diff = sym_m - diag_m;
            std::vector<double> sup(cut + 1, 0.0);
            for (int c = 0; c < diff.outerSize(); ++c) {
                int lev = sp.ket_at(c).j.twice;
                for (SparseMat::InnerIterator it(diff, c); it; ++it)
                    sup[lev] = std::max(sup[lev], std::abs(it.value()));
            }
            for (int k = 10; k <= cut - 2; ++k)
                worst = std::max(worst, sup[k] / std::pow(q, 0.5 * k));
        }
        rows.push_back(bound_row("operator-symbol consistency sup <= C q^j",
                                 "symbol determines operator mod smoothing", 5.0, worst));
    }
    return rows;
}

inline Report tau_suite(const RunConfig& cfg) {
    using namespace detail_report;
    const double q = cfg.q;
    Report rows;
    TauValue one = tau_closed(DiskElement::one(), DiskSide::plus, q);
    rows.push_back(value_row("tau1(1) = 1", "basic equalities", 1.0, one.tau1.real(), 1e-14));
    rows.push_back(
        value_row("tau0_up(1) = -1/2", "basic equalities", -0.5, one.tau0_up.real(), 1e-14));
    rows.push_back(
        value_row("tau0_dn(1) = +1/2", "basic equalities", 0.5, one.tau0_dn.real(), 1e-14));
    {
        double worst = 0;
        for (int n = 1; n <= 5; ++n) {
            double expect_p = 1.0 / (1.0 - std::pow(q, n));
            double expect_m = (n % 2 ? -1.0 : 1.0) * expect_p;
            worst = std::max(worst,
                             std::abs(tau_closed(DiskElement::monomial({0, n}), DiskSide::plus, q)
                                          .tau0_up.real() -
                                      expect_p));
            worst = std::max(worst,
                             std::abs(tau_closed(DiskElement::monomial({0, n}), DiskSide::minus, q)
                                          .tau0_up.real() -
                                      expect_m));
            worst = std::max(
                worst, std::abs(tau_closed(DiskElement::monomial({0, n}), DiskSide::plus, q)
                                    .tau1));
        }
        rows.push_back(value_row("tau0(b^n) = (+-1)^n/(1-q^n), tau1(b^n) = 0",
                                 "basic equalities", 0.0, worst, 1e-14));
    }
    {
        const int N = 200;
        double worst = 0;
        for (DiskSide side : {DiskSide::plus, DiskSide::minus})
            for (int k = -3; k <= 3; ++k)
                for (int m = 0; m <= 5; ++m) {
                    TauValue num = tau_numeric(DiskElement::monomial({k, m}), side, N, q);
                    TauValue cf = tau_closed(DiskElement::monomial({k, m}), side, q);
                    worst = std::max({worst, std::abs(num.tau1 - cf.tau1),
                                      std::abs(num.tau0_up - cf.tau0_up),
                                      std::abs(num.tau0_dn - cf.tau0_dn)});
                }
        rows.push_back(value_row("closed forms match Tr_N sweeps at N=200",
                                 "truncated trace asymptotics", 0.0, worst, 1e-10));
    }
    return rows;
}

inline Report residues_suite(const RunConfig& cfg) {
    using namespace detail_report;
    const double q = cfg.q;
    Report rows;
    FitPrecision prec =
        cfg.precision == PrecisionMode::extended ? FitPrecision::extended : FitPrecision::standard;

    ResidueTriple num = numeric_residues(ShiftOperator::identity(), 60, prec);
    rows.push_back(value_row("numeric residue at z=3 of 1", "dimension spectrum {1,2,3}", 2.0,
                             num.res3.real(), 1e-8));
    rows.push_back(value_row("numeric residue at z=2 of 1", "dimension spectrum {1,2,3}", 0.0,
                             num.res2.real(), 1e-8));
    rows.push_back(value_row("numeric residue at z=1 of 1", "dimension spectrum {1,2,3}", -0.5,
                             num.res1.real(), 1e-8));

    // independent Hurwitz decomposition of zeta_D
    {
        double oracle0 = hurwitz_zeta(-2.0, 1.5) + hurwitz_zeta(-2.0, 0.5) -
                         0.25 * hurwitz_zeta(0.0, 1.5) - 0.25 * hurwitz_zeta(0.0, 0.5);
        rows.push_back(value_row("zeta_D(0) matches the Hurwitz oracle", "spectral zeta split",
                                 oracle0, num.value_at_0 ? num.value_at_0->real() : 1e9, 1e-8));
    }

    AlgebraElement one = AlgebraElement::one();
    rows.push_back(value_row("theorem formula: integral of |D|^-3", "residue formulas", 2.0,
                             nc_integral(one, 3, q).real(), 1e-13));
    rows.push_back(value_row("theorem formula: integral of |D|^-2", "residue formulas", 0.0,
                             nc_integral(one, 2, q).real(), 1e-13));
    rows.push_back(value_row("theorem formula: integral of |D|^-1", "residue formulas", -0.5,
                             nc_integral(one, 1, q).real(), 1e-13));

    // cross-method equivalence on winding-0 operands
    {
        std::vector<std::pair<std::string, AlgebraElement>> operands = {
            {"pi(bb*)", AlgebraElement::monomial({0, 1, 1})},
            {"pi(b^2 b*^2)", AlgebraElement::monomial({0, 2, 2})},
        };
        double worst = 0;
        for (auto& [nm, x] : operands) {
            ResidueTriple r = numeric_residues(pi_of(x, q), 50, prec);
            worst = std::max({worst, std::abs(r.res3 - nc_integral(x, 3, q)),
                              std::abs(r.res2 - nc_integral(x, 2, q)),
                              std::abs(r.res1 - nc_integral(x, 1, q))});
        }
        rows.push_back(value_row("level-trace residues match the symbol route",
                                 "cross-method equivalence", 0.0, worst, 1e-6));
    }

    // up + down compressions recover the full integral
    {
        double worst = 0;
        for (auto x : {AlgebraElement::one(), AlgebraElement::monomial({0, 1, 1})}) {
            CosphereElement s = symbol_of_pi(x, q);
            for (int k = 1; k <= 3; ++k)
                worst = std::max(worst, std::abs(nc_integral(s, k, q) - nc_integral_up(s, k, q) -
                                                 nc_integral_dn(s, k, q)));
        }
        rows.push_back(value_row("up + down compressions sum to the integral",
                                 "sector split of residues", 0.0, worst, 1e-13));
    }
    return rows;
}

inline Report cocycles_suite(const RunConfig& cfg) {
    using namespace detail_report;
    Report rows;
    CocycleOptions opt;
    opt.q = cfg.q;
    opt.zeta_levels = 60;
    opt.chi_levels = rapid_decay_levels(cfg.q, 50);
    opt.sample_tuples = 120;
    opt.seed = cfg.seed;
    CocycleReport rep = cocycle_suite(opt);
    for (auto& chk : rep.checks) {
        double tol = 1e-6;
        if (chk.name.rfind("phi3", 0) == 0) tol = 1e-8;
        if (chk.name.rfind("lambda tau_odd", 0) == 0) tol = 1e-13;
        rows.push_back(value_row(chk.name, "cocycle identities", 0.0, chk.residual, tol));
    }
    // the MNW cocycle anchors
    {
        const double q = cfg.q;
        double v = tau_odd(AlgebraElement::monomial({0, 1, 0}),
                           AlgebraElement::monomial({0, 0, 1}), q)
                       .real();
        rows.push_back(value_row("tau_odd(b, b*) = -1/(1-q^2)", "HC^1 generator",
                                 -1.0 / (1.0 - q * q), v, 1e-14));
        std::mt19937_64 rng(cfg.seed + 1);
        std::uniform_int_distribution<int> L(-3, 3), M(0, 3);
        double worst = 0;
        for (int t = 0; t < 1000; ++t) {
            AlgMono m1{L(rng), M(rng), M(rng)};
            AlgMono m2{L(rng), M(rng), M(rng)};
            if (m1.n + m2.n != m1.m + m2.m || m1.l != -m2.l)
                worst = std::max(worst, std::abs(tau_odd_mono(m1, m2, q)));
        }
        rows.push_back(
            value_row("tau_odd selection rules", "HC^1 generator", 0.0, worst, 1e-14));
    }
    return rows;
}

inline Report pairing_suite(const RunConfig& cfg) {
    using namespace detail_report;
    Report rows;
    const double q = cfg.q;
    UnitaryMatrix u = UnitaryMatrix::k1_generator(q);
    Psi1Breakdown bd = psi1_pairing(u, q);
    rows.push_back(value_row("psi1(U^{-1},U)", "index pairing value", -2.0, bd.total().real(),
                             1e-12));
    rows.push_back(value_row("psi1 residue term |D|^-1", "index pairing breakdown", -2.0,
                             bd.order1.real(), 1e-12));
    rows.push_back(value_row("psi1 residue term |D|^-2", "index pairing breakdown", 0.0,
                             bd.order2.real(), 1e-12));
    rows.push_back(value_row("psi1 residue term |D|^-3", "index pairing breakdown", 0.0,
                             bd.order3.real(), 1e-12));

    {
        cplx spread_ref = psi1_pairing(UnitaryMatrix::k1_generator(0.3), 0.3).total();
        double spread = 0;
        for (double qq : {0.5, 0.8})
            spread = std::max(spread, std::abs(psi1_pairing(UnitaryMatrix::k1_generator(qq), qq)
                                                   .total() -
                                               spread_ref));
        rows.push_back(value_row("psi1 q-independence across {0.3, 0.5, 0.8}",
                                 "pairing is topological", 0.0, spread, 1e-9));
    }

    {
        cplx num = 0.0;
        int K = psi_numeric_levels(q);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                num += psi1_numeric(alg_star(u.entry[l][k], q), u.entry[l][k], q, K);
        rows.push_back(value_row("psi1 numeric-residue path", "index pairing value", -2.0,
                                 num.real(), 1e-6));
    }

    {
        cplx bb = 0.0;
        int K = rapid_decay_levels(q, 60);
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
                bb += bbeta(alg_star(u.entry[l][k], q), u.entry[l][k], q, K);
        rows.push_back(value_row("b beta coboundary cancels in the pairing", "chi1 = psi1 - b beta",
                                 0.0, std::abs(bb), 1e-9));
    }
    return rows;
}

inline Report index_suite(const RunConfig& cfg) {
    using namespace detail_report;
    Report rows;
    const double q = cfg.q;
    UnitaryMatrix u = UnitaryMatrix::k1_generator(q);

    KernelReport kr = fredholm_index_kernel(u, 8, cfg.tol_kernel, q);
    rows.push_back(value_row("dim ker PUP", "kernel computation", 1.0, double(kr.dim_ker_u), 0.5));
    rows.push_back(
        value_row("dim ker PU*P", "kernel computation", 0.0, double(kr.dim_ker_u_star), 0.5));
    rows.push_back(value_row("ind(PUP)", "Fredholm index", 1.0, double(kr.index), 0.5));

    {
        TruncatedSpace space(8);
        Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(kr.kernel_vector.size());
        std::vector<int> compact(space.dimension(), -1);
        for (std::size_t i = 0; i < kr.up_kets.size(); ++i) compact[kr.up_kets[i]] = int(i);
        SpinKet k0{HalfInt(0), HalfInt(0), HalfInt::from_twice(-1), Spin::up};
        SpinKet k1{HalfInt(0), HalfInt(0), HalfInt::from_twice(1), Spin::up};
        expect[2 * compact[int(*space.index_of(k0))] + 0] = 1.0;
        expect[2 * compact[int(*space.index_of(k1))] + 1] = -1.0 / q;
        expect.normalize();
        double overlap = kr.dim_ker_u >= 1 ? std::abs(expect.dot(kr.kernel_vector)) : 0.0;
        rows.push_back(
            value_row("kernel vector overlap", "kernel vector", 1.0, overlap, 1e-10));
    }

    int K = rapid_decay_levels(q, 60);
    rows.push_back(value_row("parametrix trace formula", "trace index formula", 1.0,
                             fredholm_index_trace(u, K, q), 1e-6));
    cplx chi = chi1_pairing(u, q, K);
    rows.push_back(value_row("chi1(U^{-1},U)", "Chern character pairing", -2.0, chi.real(), 1e-8));

    {
        double dev = std::abs(double(kr.index) - std::lround(fredholm_index_trace(u, K, q))) +
                     std::abs(double(kr.index) - std::lround(-0.5 * chi.real()));
        rows.push_back(
            value_row("cross-formula index equality", "index route agreement", 0.0, dev, 0.5));
    }
    return rows;
}

// ---------------------------------------------------------------------------
inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"relations", "smoothing", "symbols", "tau",
                                                   "residues",  "cocycles",  "pairing", "index"};
    return names;
}

inline Report run_suite(const std::string& name, const RunConfig& cfg) {
    auto timed = [&](Report (*fn)(const RunConfig&)) {
        auto t0 = std::chrono::steady_clock::now();
        Report r = fn(cfg);
        auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
        for (auto& row : r) row.wall_ms = ms / double(r.size());
        return r;
    };
    if (name == "relations") return timed(relations_suite);
    if (name == "smoothing") return timed(smoothing_suite);
    if (name == "symbols") return timed(symbols_suite);
    if (name == "tau") return timed(tau_suite);
    if (name == "residues") return timed(residues_suite);
    if (name == "cocycles") return timed(cocycles_suite);
    if (name == "pairing") return timed(pairing_suite);
    if (name == "index") return timed(index_suite);
    if (name == "report-all") {
        Report all;
        for (auto& n : suite_names()) {
            Report r = run_suite(n, cfg);
            all.insert(all.end(), r.begin(), r.end());
        }
        return all;
    }
    throw ConfigError("unknown suite: " + name);
}

// ---------------------------------------------------------------------------
// Serialization.  Timing never enters the byte stream.

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string to_json(const Report& rep) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& r : rep) {
        nlohmann::ordered_json row;
        row["name"] = r.name;
        row["anchor"] = r.anchor;
        row["target"] = r.target;
        row["computed"] = r.computed;
        row["residual"] = r.residual;
        row["pass"] = r.pass;
        arr.push_back(row);
    }
    return arr.dump(2) + "\n";
}

inline std::string to_csv(const Report& rep) {
    std::ostringstream os;
    os << "name,anchor,target,computed,residual,pass\n";
    for (auto& r : rep)
        os << '"' << r.name << "\",\"" << r.anchor << "\"," << format_double(r.target) << ','
           << format_double(r.computed) << ',' << format_double(r.residual) << ','
           << (r.pass ? "true" : "false") << '\n';
    return os.str();
}

inline std::string to_text(const Report& rep) {
    std::ostringstream os;
    for (auto& r : rep) {
        char line[256];
        std::snprintf(line, sizeof(line), "%-4s  %-52s  target %-12.6g computed %-14.9g residual %-10.3g\n",
                      r.pass ? "ok" : "FAIL", r.name.c_str(), r.target, r.computed, r.residual);
        os << line;
    }
    int passed = 0;
    for (auto& r : rep) passed += r.pass ? 1 : 0;
    os << passed << "/" << rep.size() << " checks passed\n";
    return os.str();
}

inline std::string serialize(const Report& rep, OutputFormat fmt) {
    switch (fmt) {
        case OutputFormat::json: return to_json(rep);
        case OutputFormat::csv: return to_csv(rep);
        case OutputFormat::text: return to_text(rep);
    }
    return {};
}

// ---------------------------------------------------------------------------
// key=value config files, overridden by flags.
inline void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&] { return std::stod(value); };
    if (key == "q") cfg.q = as_double();
    else if (key == "max-2j" || key == "max2j") cfg.max2j = std::stoi(value);
    else if (key == "tol") cfg.tol_check = as_double();
    else if (key == "tol-kernel") cfg.tol_kernel = as_double();
    else if (key == "seed") cfg.seed = unsigned(std::stoul(value));
    else if (key == "threads") cfg.threads = std::stoi(value);
    else if (key == "out-file") cfg.out_file = value;
    else if (key == "strict-truncation") cfg.strict_truncation = value == "true" || value == "1";
    else if (key == "precision") {
        if (value == "standard") cfg.precision = PrecisionMode::standard;
        else if (value == "extended") cfg.precision = PrecisionMode::extended;
        else throw ConfigError("precision must be standard or extended");
    } else if (key == "output") {
        if (value == "json") cfg.output = OutputFormat::json;
        else if (value == "csv") cfg.output = OutputFormat::csv;
        else if (value == "text") cfg.output = OutputFormat::text;
        else throw ConfigError("output must be json, csv or text");
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_config_kv(cfg, key, value);
    }
}

// Runs one suite and writes the report; returns the process exit status
// (0 all pass, 1 check failures).
inline int run(const std::string& suite, const RunConfig& cfg, std::ostream& out,
               std::ostream& err) {
    cfg.validate();
    Report rep = run_suite(suite, cfg);
    std::string payload = serialize(rep, cfg.output);
    if (cfg.out_file.empty()) {
        out << payload;
    } else {
        std::ofstream f(cfg.out_file, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file: " + cfg.out_file);
        f << payload;
    }
    int failures = 0;
    for (auto& r : rep)
        if (!r.pass) {
            ++failures;
            err << "FAIL " << r.name << ": target " << format_double(r.target) << " computed "
                << format_double(r.computed) << " residual " << format_double(r.residual) << "\n";
        }
    return failures == 0 ? 0 : 1;
}

}  // namespace suq2
