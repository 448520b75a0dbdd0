#pragma once

// Operator calculus on the spinor space: the spinor and approximate
// representations, the Dirac family, the derivations delta and nabla, and
// materialization.
//
// Operators are kept symbolic as finite sums of lattice-shift terms; every
// term carries a 2x2 coefficient function of the source labels (j, mu, n)
// with rows indexed by target spin and columns by source spin.  Products,
// adjoints and derivations act term by term, so they are exact and
// independent of any truncation until a final materialization.

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "suq2/fock.hpp"
#include "suq2/qnum.hpp"

namespace suq2 {

// ---------------------------------------------------------------------------
struct Mat2 {
    cplx m[2][2]{{0.0, 0.0}, {0.0, 0.0}};

    static Mat2 zero() { return {}; }
    static Mat2 diag(cplx up, cplx dn) {
        Mat2 r;
        r.m[0][0] = up;
        r.m[1][1] = dn;
        return r;
    }

    cplx& operator()(Spin target, Spin source) { return m[int(target)][int(source)]; }
    cplx operator()(Spin target, Spin source) const { return m[int(target)][int(source)]; }

    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int t = 0; t < 2; ++t)
            for (int s = 0; s < 2; ++s) r.m[t][s] = m[t][s] + o.m[t][s];
        return r;
    }
    Mat2 operator*(cplx c) const {
        Mat2 r;
        for (int t = 0; t < 2; ++t)
            for (int s = 0; s < 2; ++s) r.m[t][s] = m[t][s] * c;
        return r;
    }
    Mat2 adjoint() const {
        Mat2 r;
        for (int t = 0; t < 2; ++t)
            for (int s = 0; s < 2; ++s) r.m[t][s] = std::conj(m[s][t]);
        return r;
    }
    double max_abs() const {
        double v = 0;
        for (int t = 0; t < 2; ++t)
            for (int s = 0; s < 2; ++s) v = std::max(v, std::abs(m[t][s]));
        return v;
    }
};

// Matrix product that never evaluates a factor against an exact zero, so
// coefficients guarded to zero outside the valid lattice cannot leak NaNs.
inline Mat2 mat_mul(const Mat2& f, const Mat2& g) {
    Mat2 r;
    for (int t = 0; t < 2; ++t)
        for (int s = 0; s < 2; ++s) {
            cplx acc = 0.0;
            for (int i = 0; i < 2; ++i) {
                if (f.m[t][i] == 0.0 || g.m[i][s] == 0.0) continue;
                acc += f.m[t][i] * g.m[i][s];
            }
            r.m[t][s] = acc;
        }
    return r;
}

// ---------------------------------------------------------------------------
struct ShiftKey {
    HalfInt dj, dmu, dn;
    auto operator<=>(const ShiftKey&) const = default;
    ShiftKey operator+(const ShiftKey& o) const { return {dj + o.dj, dmu + o.dmu, dn + o.dn}; }
    ShiftKey operator-() const { return {-dj, -dmu, -dn}; }
};

using CoeffFn = std::function<Mat2(HalfInt j, HalfInt mu, HalfInt n)>;

struct ShiftTerm {
    ShiftKey shift;
    CoeffFn coeff;
    int depth = 1;
};

// Zero out coefficient entries whose source or target ket is invalid.  For
// the spinor representation this is a no-op analytically (the boundary
// factors vanish); for the approximate representation it implements the
// compression onto the valid lattice.
inline CoeffFn guard_coeff(ShiftKey shift, CoeffFn raw) {
    return [shift, raw = std::move(raw)](HalfInt j, HalfInt mu, HalfInt n) {
        Mat2 out;
        Mat2 val;
        bool evaluated = false;
        for (int s = 0; s < 2; ++s) {
            SpinKet src{j, mu, n, Spin(s)};
            if (!valid_ket(src)) continue;
            for (int t = 0; t < 2; ++t) {
                SpinKet dst{j + shift.dj, mu + shift.dmu, n + shift.dn, Spin(t)};
                if (!valid_ket(dst)) continue;
                if (!evaluated) {
                    val = raw(j, mu, n);
                    evaluated = true;
                }
                out.m[t][s] = val.m[t][s];
            }
        }
        return out;
    };
}

// Flatten a deep closure chain into a memo table, one entry per label triple.
inline CoeffFn memoize_coeff(CoeffFn fn) {
    auto cache = std::make_shared<std::map<std::tuple<int, int, int>, Mat2>>();
    return [fn = std::move(fn), cache](HalfInt j, HalfInt mu, HalfInt n) {
        auto key = std::tuple(j.twice, mu.twice, n.twice);
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        Mat2 v = fn(j, mu, n);
        cache->emplace(key, v);
        return v;
    };
}

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& m) : std::runtime_error(m) {}
};

enum class TruncationPolicy { drop, strict };

// ---------------------------------------------------------------------------
// Diagonal operators of the Dirac family: eigenvalue depends on (j, spin).
struct DiagonalOperator {
    std::function<double(HalfInt j, Spin s)> eigenvalue;
};

inline double abs_dirac_eigenvalue(HalfInt j, Spin s) {
    return s == Spin::up ? j.twice + 1.5 : j.twice + 0.5;
}
inline double dirac_eigenvalue(HalfInt j, Spin s) {
    return s == Spin::up ? j.twice + 1.5 : -(j.twice + 0.5);
}

inline DiagonalOperator dirac() { return {&dirac_eigenvalue}; }
inline DiagonalOperator abs_dirac() { return {&abs_dirac_eigenvalue}; }
inline DiagonalOperator sign_f() {
    return {[](HalfInt, Spin s) { return s == Spin::up ? 1.0 : -1.0; }};
}
inline DiagonalOperator proj_up() {
    return {[](HalfInt, Spin s) { return s == Spin::up ? 1.0 : 0.0; }};
}
inline DiagonalOperator proj_dn() {
    return {[](HalfInt, Spin s) { return s == Spin::up ? 0.0 : 1.0; }};
}
inline DiagonalOperator abs_dirac_pow(double z) {
    return {[z](HalfInt j, Spin s) { return std::pow(abs_dirac_eigenvalue(j, s), z); }};
}

// ---------------------------------------------------------------------------
class ShiftOperator {
  public:
    ShiftOperator() = default;
    explicit ShiftOperator(std::vector<ShiftTerm> terms) : terms_(std::move(terms)) {}

    static ShiftOperator zero() { return ShiftOperator(); }

    static ShiftOperator identity() {
        ShiftTerm t;
        t.shift = {};
        t.coeff = [](HalfInt j, HalfInt mu, HalfInt n) {
            Mat2 r;
            for (int s = 0; s < 2; ++s)
                if (valid_ket({j, mu, n, Spin(s)})) r.m[s][s] = 1.0;
            return r;
        };
        return ShiftOperator({t});
    }

    static ShiftOperator from_diagonal(const DiagonalOperator& d) {
        ShiftTerm t;
        t.shift = {};
        t.coeff = [eig = d.eigenvalue](HalfInt j, HalfInt mu, HalfInt n) {
            Mat2 r;
            for (int s = 0; s < 2; ++s)
                if (valid_ket({j, mu, n, Spin(s)})) r.m[s][s] = eig(j, Spin(s));
            return r;
        };
        return ShiftOperator({t});
    }

    const std::vector<ShiftTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    ShiftOperator operator+(const ShiftOperator& o) const {
        ShiftOperator r = *this;
        for (const auto& t : o.terms_) r.add_term(t);
        return r;
    }

    ShiftOperator operator-(const ShiftOperator& o) const { return *this + o * cplx(-1.0); }

    ShiftOperator operator*(cplx c) const {
        ShiftOperator r;
        for (const auto& t : terms_) {
            ShiftTerm nt;
            nt.shift = t.shift;
            nt.depth = t.depth + 1;
            nt.coeff = [f = t.coeff, c](HalfInt j, HalfInt mu, HalfInt n) { return f(j, mu, n) * c; };
            r.terms_.push_back(cap(std::move(nt)));
        }
        return r;
    }

    // Operator product: (A*B) psi = A (B psi).
    ShiftOperator operator*(const ShiftOperator& o) const {
        ShiftOperator r;
        for (const auto& ta : terms_)
            for (const auto& tb : o.terms_) {
                ShiftTerm nt;
                nt.shift = ta.shift + tb.shift;
                nt.depth = std::max(ta.depth, tb.depth) + 1;
                nt.coeff = [fa = ta.coeff, fb = tb.coeff, sh = tb.shift](HalfInt j, HalfInt mu,
                                                                         HalfInt n) {
                    Mat2 inner = fb(j, mu, n);
                    if (inner.max_abs() == 0.0) return Mat2::zero();
                    Mat2 outer = fa(j + sh.dj, mu + sh.dmu, n + sh.dn);
                    return mat_mul(outer, inner);
                };
                r.add_term(cap(std::move(nt)));
            }
        return r;
    }

    ShiftOperator adjoint() const {
        ShiftOperator r;
        for (const auto& t : terms_) {
            ShiftTerm nt;
            nt.shift = -t.shift;
            nt.depth = t.depth + 1;
            nt.coeff = [f = t.coeff, sh = t.shift](HalfInt j, HalfInt mu, HalfInt n) {
                return f(j - sh.dj, mu - sh.dmu, n - sh.dn).adjoint();
            };
            r.terms_.push_back(cap(std::move(nt)));
        }
        return r;
    }

    // Entrywise scaling by a function of (target level/spin, source level/spin).
    ShiftOperator scaled_entrywise(std::function<double(HalfInt jt, Spin t, HalfInt js, Spin s)> w) const {
        ShiftOperator r;
        for (const auto& t : terms_) {
            ShiftTerm nt;
            nt.shift = t.shift;
            nt.depth = t.depth + 1;
            nt.coeff = [f = t.coeff, w, dj = t.shift.dj](HalfInt j, HalfInt mu, HalfInt n) {
                Mat2 v = f(j, mu, n);
                Mat2 out;
                for (int tt = 0; tt < 2; ++tt)
                    for (int ss = 0; ss < 2; ++ss) {
                        if (v.m[tt][ss] == 0.0) continue;  // never touch masked entries
                        out.m[tt][ss] = v.m[tt][ss] * w(j + dj, Spin(tt), j, Spin(ss));
                    }
                return out;
            };
            r.terms_.push_back(cap(std::move(nt)));
        }
        return r;
    }

    ShiftOperator left_diag(const DiagonalOperator& d) const {
        return scaled_entrywise([eig = d.eigenvalue](HalfInt jt, Spin t, HalfInt, Spin) {
            return eig(jt, t);
        });
    }
    ShiftOperator right_diag(const DiagonalOperator& d) const {
        return scaled_entrywise([eig = d.eigenvalue](HalfInt, Spin, HalfInt js, Spin s) {
            return eig(js, s);
        });
    }

    // Aggregate coefficient for one shift key at given source labels.
    Mat2 evaluate(ShiftKey key, HalfInt j, HalfInt mu, HalfInt n) const {
        Mat2 acc;
        for (const auto& t : terms_)
            if (t.shift == key) acc = acc + t.coeff(j, mu, n);
        return acc;
    }

    std::vector<ShiftKey> shift_keys() const {
        std::vector<ShiftKey> keys;
        for (const auto& t : terms_) keys.push_back(t.shift);
        return keys;
    }

    // All amplitudes out of one source ket (no truncation applied).
    std::vector<std::pair<SpinKet, cplx>> column(const SpinKet& src) const {
        std::vector<std::pair<SpinKet, cplx>> out;
        for (const auto& t : terms_) {
            Mat2 v = t.coeff(src.j, src.mu, src.n);
            for (int tt = 0; tt < 2; ++tt) {
                cplx amp = v.m[tt][int(src.spin)];
                if (amp == 0.0) continue;
                SpinKet dst{src.j + t.shift.dj, src.mu + t.shift.dmu, src.n + t.shift.dn, Spin(tt)};
                out.emplace_back(dst, amp);
            }
        }
        // merge duplicate targets from different terms
        std::map<SpinKet, cplx> merged;
        for (auto& [k, a] : out) merged[k] += a;
        out.assign(merged.begin(), merged.end());
        return out;
    }

  private:
    static ShiftTerm cap(ShiftTerm t) {
        // a runaway closure chain is flattened into a per-label memo table
        constexpr int kDepthCap = 16;
        if (t.depth > kDepthCap) {
            t.coeff = memoize_coeff(std::move(t.coeff));
            t.depth = 1;
        }
        return t;
    }

    void add_term(ShiftTerm t) {
        for (auto& mine : terms_) {
            if (mine.shift == t.shift) {
                ShiftTerm merged;
                merged.shift = t.shift;
                merged.depth = std::max(mine.depth, t.depth) + 1;
                merged.coeff = [f = mine.coeff, g = t.coeff](HalfInt j, HalfInt mu, HalfInt n) {
                    return f(j, mu, n) + g(j, mu, n);
                };
                mine = cap(std::move(merged));
                return;
            }
        }
        terms_.push_back(std::move(t));
    }

    std::vector<ShiftTerm> terms_;
};

inline ShiftOperator operator*(cplx c, const ShiftOperator& op) { return op * c; }

// ---------------------------------------------------------------------------
// The derivations.  delta(T) = |D|T - T|D| multiplies each coefficient entry
// by the eigenvalue difference; nabla(T) = [D^2, T] and [D, T] likewise.
inline ShiftOperator delta(const ShiftOperator& T) {
    return T.scaled_entrywise([](HalfInt jt, Spin t, HalfInt js, Spin s) {
        return abs_dirac_eigenvalue(jt, t) - abs_dirac_eigenvalue(js, s);
    });
}

inline ShiftOperator delta_pow(const ShiftOperator& T, int k) {
    return T.scaled_entrywise([k](HalfInt jt, Spin t, HalfInt js, Spin s) {
        return std::pow(abs_dirac_eigenvalue(jt, t) - abs_dirac_eigenvalue(js, s), k);
    });
}

inline ShiftOperator nabla(const ShiftOperator& T) {
    return T.scaled_entrywise([](HalfInt jt, Spin t, HalfInt js, Spin s) {
        double et = dirac_eigenvalue(jt, t), es = dirac_eigenvalue(js, s);
        return et * et - es * es;
    });
}

inline ShiftOperator commutator_d(const ShiftOperator& T) {
    return T.scaled_entrywise([](HalfInt jt, Spin t, HalfInt js, Spin s) {
        return dirac_eigenvalue(jt, t) - dirac_eigenvalue(js, s);
    });
}

// [|D|^z, T] with real z, exact per entry.
inline ShiftOperator commutator_abs_dirac_pow(const ShiftOperator& T, double z) {
    return T.scaled_entrywise([z](HalfInt jt, Spin t, HalfInt js, Spin s) {
        return std::pow(abs_dirac_eigenvalue(jt, t), z) - std::pow(abs_dirac_eigenvalue(js, s), z);
    });
}

// ---------------------------------------------------------------------------
// The spinor representation.  Coefficient matrices act on the (up, down)
// coefficient pair from the left: rows are target spin, columns source spin.
enum class Gen { a, b, a_star, b_star, a_plus, a_minus, b_plus, b_minus };

namespace detail {

struct RepCtx {
    double q;
    double qn(HalfInt N) const { return q_number(N, DeformParam(q)); }
    double sq(HalfInt N) const { return std::sqrt(qn(N)); }
    double qp(HalfInt e) const { return std::pow(q, e.value()); }
    double qp(double e) const { return std::pow(q, e); }
};

// Raw coefficient functions straight off the printed matrices.
inline CoeffFn raw_a_plus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        Mat2 m;
        double pref = ctx.qp((mu + n - half_one).value() / 2.0) * ctx.sq(j + mu + 1);
        m(Spin::up, Spin::up) = pref * ctx.qp(-j - half_one) * ctx.sq(j + n + HalfInt::from_twice(3)) / ctx.qn(j + j + 2);
        m(Spin::dn, Spin::up) = pref * ctx.qp(0.5) * ctx.sq(j - n + half_one) / (ctx.qn(j + j + 1) * ctx.qn(j + j + 2));
        m(Spin::dn, Spin::dn) = pref * ctx.qp(-j) * ctx.sq(j + n + half_one) / ctx.qn(j + j + 1);
        return m;
    };
}

inline CoeffFn raw_a_minus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        Mat2 m;
        double pref = ctx.qp((mu + n - half_one).value() / 2.0) * ctx.sq(j - mu);
        m(Spin::up, Spin::up) = pref * ctx.qp(j + 1) * ctx.sq(j - n + half_one) / ctx.qn(j + j + 1);
        m(Spin::up, Spin::dn) = -pref * ctx.qp(0.5) * ctx.sq(j + n + half_one) / (ctx.qn(j + j) * ctx.qn(j + j + 1));
        m(Spin::dn, Spin::dn) = pref * ctx.qp(j + half_one) * ctx.sq(j - n - half_one) / ctx.qn(j + j);
        return m;
    };
}

inline CoeffFn raw_b_plus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        Mat2 m;
        double pref = ctx.qp((mu + n - half_one).value() / 2.0) * ctx.sq(j + mu + 1);
        m(Spin::up, Spin::up) = pref * ctx.sq(j - n + HalfInt::from_twice(3)) / ctx.qn(j + j + 2);
        m(Spin::dn, Spin::up) = -pref * ctx.qp(-j - 1) * ctx.sq(j + n + half_one) / (ctx.qn(j + j + 1) * ctx.qn(j + j + 2));
        m(Spin::dn, Spin::dn) = pref * ctx.qp(-0.5) * ctx.sq(j - n + half_one) / ctx.qn(j + j + 1);
        return m;
    };
}

inline CoeffFn raw_b_minus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        Mat2 m;
        double pref = ctx.qp((mu + n - half_one).value() / 2.0) * ctx.sq(j - mu);
        m(Spin::up, Spin::up) = -pref * ctx.qp(-0.5) * ctx.sq(j + n + half_one) / ctx.qn(j + j + 1);
        m(Spin::up, Spin::dn) = -pref * ctx.qp(j) * ctx.sq(j - n + half_one) / (ctx.qn(j + j) * ctx.qn(j + j + 1));
        m(Spin::dn, Spin::dn) = -pref * ctx.sq(j + n - half_one) / ctx.qn(j + j);
        return m;
    };
}

inline CoeffFn raw_ul_a_plus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        double f = std::sqrt(1.0 - ctx.qp((j + j + mu + mu + 2).value()));
        return Mat2::diag(f * std::sqrt(1.0 - ctx.qp((j + j + n + n).value() + 3.0)),
                          f * std::sqrt(1.0 - ctx.qp((j + j + n + n).value() + 1.0)));
    };
}

inline CoeffFn raw_ul_a_minus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        double f = ctx.qp((j + j + mu + n + half_one).value());
        return Mat2::diag(f * ctx.q, f);
    };
}

inline CoeffFn raw_ul_b_plus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        double f = ctx.qp((j + n - half_one).value()) * std::sqrt(1.0 - ctx.qp((j + j + mu + mu + 2).value()));
        return Mat2::diag(f * ctx.q, f);
    };
}

inline CoeffFn raw_ul_b_minus(double q) {
    return [ctx = RepCtx{q}](HalfInt j, HalfInt mu, HalfInt n) {
        double f = -ctx.qp((j + mu).value());
        return Mat2::diag(f * std::sqrt(1.0 - ctx.qp((j + j + n + n).value() + 1.0)),
                          f * std::sqrt(1.0 - ctx.qp((j + j + n + n).value() - 1.0)));
    };
}

inline constexpr ShiftKey shift_a_plus{HalfInt::from_twice(1), HalfInt::from_twice(1), HalfInt::from_twice(1)};
inline constexpr ShiftKey shift_a_minus{HalfInt::from_twice(-1), HalfInt::from_twice(1), HalfInt::from_twice(1)};
inline constexpr ShiftKey shift_b_plus{HalfInt::from_twice(1), HalfInt::from_twice(1), HalfInt::from_twice(-1)};
inline constexpr ShiftKey shift_b_minus{HalfInt::from_twice(-1), HalfInt::from_twice(1), HalfInt::from_twice(-1)};

inline ShiftOperator one_term(ShiftKey key, CoeffFn raw) {
    ShiftTerm t;
    t.shift = key;
    t.coeff = guard_coeff(key, std::move(raw));
    return ShiftOperator({t});
}

}  // namespace detail

// Unguarded coefficient of a signed half generator, for boundary checks.
inline std::pair<ShiftKey, CoeffFn> spin_rep_raw(Gen g, double q) {
    using namespace detail;
    switch (g) {
        case Gen::a_plus: return {shift_a_plus, raw_a_plus(q)};
        case Gen::a_minus: return {shift_a_minus, raw_a_minus(q)};
        case Gen::b_plus: return {shift_b_plus, raw_b_plus(q)};
        case Gen::b_minus: return {shift_b_minus, raw_b_minus(q)};
        default: throw std::invalid_argument("spin_rep_raw: only signed halves have raw forms");
    }
}

inline ShiftOperator spin_rep(Gen g, double q) {
    using namespace detail;
    switch (g) {
        case Gen::a_plus: return one_term(shift_a_plus, raw_a_plus(q));
        case Gen::a_minus: return one_term(shift_a_minus, raw_a_minus(q));
        case Gen::b_plus: return one_term(shift_b_plus, raw_b_plus(q));
        case Gen::b_minus: return one_term(shift_b_minus, raw_b_minus(q));
        case Gen::a: return spin_rep(Gen::a_plus, q) + spin_rep(Gen::a_minus, q);
        case Gen::b: return spin_rep(Gen::b_plus, q) + spin_rep(Gen::b_minus, q);
        case Gen::a_star: return spin_rep(Gen::a, q).adjoint();
        case Gen::b_star: return spin_rep(Gen::b, q).adjoint();
    }
    return ShiftOperator::zero();
}

inline ShiftOperator approx_rep(Gen g, double q) {
    using namespace detail;
    switch (g) {
        case Gen::a_plus: return one_term(shift_a_plus, raw_ul_a_plus(q));
        case Gen::a_minus: return one_term(shift_a_minus, raw_ul_a_minus(q));
        case Gen::b_plus: return one_term(shift_b_plus, raw_ul_b_plus(q));
        case Gen::b_minus: return one_term(shift_b_minus, raw_ul_b_minus(q));
        case Gen::a: return approx_rep(Gen::a_plus, q) + approx_rep(Gen::a_minus, q);
        case Gen::b: return approx_rep(Gen::b_plus, q) + approx_rep(Gen::b_minus, q);
        case Gen::a_star: return approx_rep(Gen::a, q).adjoint();
        case Gen::b_star: return approx_rep(Gen::b, q).adjoint();
    }
    return ShiftOperator::zero();
}

// ---------------------------------------------------------------------------
// Materialization to a compressed sparse matrix over a truncated space.
using SparseMat = Eigen::SparseMatrix<cplx>;

inline SparseMat materialize(const ShiftOperator& op, const TruncatedSpace& space,
                             TruncationPolicy policy = TruncationPolicy::drop) {
    std::vector<Eigen::Triplet<cplx>> trips;
    const std::size_t dim = space.dimension();
    for (std::size_t col = 0; col < dim; ++col) {
        SpinKet src = space.ket_at(col);
        for (auto& [dst, amp] : op.column(src)) {
            auto row = space.index_of(dst);
            if (!row) {
                if (policy == TruncationPolicy::strict && std::abs(amp) > 0.0)
                    throw TruncationError("materialize: amplitude beyond the truncation cut");
                continue;
            }
            trips.emplace_back(int(*row), int(col), amp);
        }
    }
    SparseMat m{static_cast<int>(dim), static_cast<int>(dim)};
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

inline SparseMat materialize(const DiagonalOperator& d, const TruncatedSpace& space) {
    return materialize(ShiftOperator::from_diagonal(d), space);
}

// ---------------------------------------------------------------------------
// Per-level evaluation helpers (no truncation involved).

// sup over |entries| of all amplitudes out of level k sources.
inline double level_sup_entry(const ShiftOperator& op, int k) {
    double sup = 0;
    HalfInt j = HalfInt::from_twice(k);
    for (int mu2 = -k; mu2 <= k; mu2 += 2)
        for (int n2 = -(k + 1); n2 <= k + 1; n2 += 2) {
            for (const auto& t : op.terms()) {
                Mat2 v = t.coeff(j, HalfInt::from_twice(mu2), HalfInt::from_twice(n2));
                sup = std::max(sup, v.max_abs());
            }
        }
    return sup;
}

enum class Sector { up, dn, both };

// Trace of the level-k diagonal block; only net-zero shifts contribute.
inline cplx level_trace(const ShiftOperator& op, int k, Sector sector = Sector::both) {
    cplx acc = 0.0;
    HalfInt j = HalfInt::from_twice(k);
    const ShiftKey zero{};
    bool any = false;
    for (const auto& t : op.terms())
        if (t.shift == zero) any = true;
    if (!any) return acc;
    for (int mu2 = -k; mu2 <= k; mu2 += 2)
        for (int n2 = -(k + 1); n2 <= k + 1; n2 += 2) {
            Mat2 v;
            bool got = false;
            for (const auto& t : op.terms()) {
                if (!(t.shift == zero)) continue;
                Mat2 c = t.coeff(j, HalfInt::from_twice(mu2), HalfInt::from_twice(n2));
                v = got ? v + c : c;
                got = true;
            }
            if (!got) continue;
            SpinKet up{j, HalfInt::from_twice(mu2), HalfInt::from_twice(n2), Spin::up};
            SpinKet dn{j, HalfInt::from_twice(mu2), HalfInt::from_twice(n2), Spin::dn};
            if (sector != Sector::dn && valid_ket(up)) acc += v(Spin::up, Spin::up);
            if (sector != Sector::up && valid_ket(dn)) acc += v(Spin::dn, Spin::dn);
        }
    return acc;
}

// ---------------------------------------------------------------------------
// Finite-scale check of the binomial expansion of [|D|^z, T]: the partial sum
// up to order K leaves a per-level residual decaying like j^{z-K-1}.
struct BinomialCheck {
    std::vector<int> levels;
    std::vector<double> residual_sup;
    double fitted_exponent = 0;  // log-log slope across the sampled levels
};

inline double real_binomial(double z, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (z - i) / double(i + 1);
    return r;
}

inline BinomialCheck binomial_expansion_check(const ShiftOperator& T, double z, int K,
                                              int level_lo, int level_hi, int stride = 2) {
    if (K > 5) throw std::invalid_argument("binomial_expansion_check: K <= 5");
    ShiftOperator R = commutator_abs_dirac_pow(T, z);
    for (int k = 1; k <= K; ++k)
        R = R - real_binomial(z, k) * delta_pow(T, k).right_diag(abs_dirac_pow(z - double(k)));

    BinomialCheck out;
    for (int lev = level_lo; lev <= level_hi; lev += stride) {
        out.levels.push_back(lev);
        out.residual_sup.push_back(level_sup_entry(R, lev));
    }
    // least-squares slope of log residual against log h
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t i = 0; i < out.levels.size(); ++i) {
        if (out.residual_sup[i] <= 0) continue;
        double x = std::log(out.levels[i] + 1.5);
        double y = std::log(out.residual_sup[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    out.fitted_exponent = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Largest singular value by power iteration on A^dagger A.
inline double operator_norm_estimate(const SparseMat& A, int iters = 80, unsigned seed = 11) {
    const int n = int(A.cols());
    if (n == 0) return 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(U(rng), U(rng));
    v.normalize();
    SparseMat At = SparseMat(A.adjoint());
    double lam = 0;
    for (int it = 0; it < iters; ++it) {
        Eigen::VectorXcd w = At * (A * v);
        double nn = w.norm();
        if (nn == 0) return 0.0;
        v = w / nn;
        lam = nn;
    }
    return std::sqrt(lam);
}

}  // namespace suq2
