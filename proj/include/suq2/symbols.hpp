#pragma once

// PBW normal forms for the coordinate algebra and the two quantum disks, the
// quotient maps, the circle symbol, and the cosphere symbol map rho with its
// winding grading.

#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "suq2/qnum.hpp"

namespace suq2 {

// ---------------------------------------------------------------------------
// Coordinate algebra elements in the ordered basis a^l b^m (b*)^n, with
// a^{-l} meaning (a*)^l.  Rewriting moves a-powers to the left, so b^m a^l
// picks up q^{l m}, and mixed aa*/a*a pairs reduce to bb*-polynomials.

struct AlgMono {
    int l = 0;  // signed a-power
    int m = 0;  // b-power
    int n = 0;  // b*-power
    auto operator<=>(const AlgMono&) const = default;
};

class AlgebraElement {
  public:
    std::map<AlgMono, cplx> terms;

    static AlgebraElement zero() { return {}; }
    static AlgebraElement one() { return monomial({0, 0, 0}); }
    static AlgebraElement monomial(AlgMono m, cplx c = 1.0) {
        AlgebraElement e;
        if (c != 0.0) e.terms[m] = c;
        return e;
    }

    bool is_zero(double eps = 0.0) const {
        for (auto& [m, c] : terms)
            if (std::abs(c) > eps) return false;
        return true;
    }

    AlgebraElement& prune(double eps = 1e-300) {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
        return *this;
    }

    AlgebraElement operator+(const AlgebraElement& o) const {
        AlgebraElement r = *this;
        for (auto& [m, c] : o.terms) r.terms[m] += c;
        r.prune();
        return r;
    }
    AlgebraElement operator-(const AlgebraElement& o) const { return *this + o * cplx(-1.0); }
    AlgebraElement operator*(cplx c) const {
        AlgebraElement r;
        for (auto& [m, cc] : terms)
            if (cc * c != 0.0) r.terms[m] = cc * c;
        return r;
    }
};

inline AlgebraElement operator*(cplx c, const AlgebraElement& e) { return e * c; }

// Distance between normal forms, used for symbolic-equality assertions.
inline double alg_distance(const AlgebraElement& x, const AlgebraElement& y) {
    AlgebraElement d = x - y;
    double sup = 0;
    for (auto& [m, c] : d.terms) sup = std::max(sup, std::abs(c));
    return sup;
}

namespace detail {

// a^l a^{l'} -> sum over (l'', p) of coeff * a^{l''} (bb*)^p, using
// a a* = 1 - bb* and a* a = 1 - q^2 bb*.
inline std::map<std::pair<int, int>, double> reduce_a_powers(int l, int lp, double q) {
    std::map<std::pair<int, int>, double> out;
    if (l == 0 || lp == 0 || (l > 0) == (lp > 0)) {
        out[{l + lp, 0}] = 1.0;
        return out;
    }
    if (l > 0) {  // a^l (a*)^k with k = -lp
        int k = -lp;
        auto rec = reduce_a_powers(l - 1, lp + 1, q);
        for (auto& [key, c] : rec) {
            out[key] += c;
            out[{key.first, key.second + 1}] -= c * std::pow(q, -2.0 * (k - 1));
        }
        return out;
    }
    // (a*)^k a^{l'} with k = -l
    auto rec = reduce_a_powers(l + 1, lp - 1, q);
    for (auto& [key, c] : rec) {
        out[key] += c;
        out[{key.first, key.second + 1}] -= c * std::pow(q, 2.0 * lp);
    }
    return out;
}

}  // namespace detail

inline AlgebraElement alg_mul_mono(const AlgMono& A, const AlgMono& B, cplx coeff, double q) {
    // b^m (b*)^n a^{l'} = q^{l'(m+n)} a^{l'} b^m (b*)^n
    double phase = std::pow(q, double(B.l) * double(A.m + A.n));
    AlgebraElement out;
    for (auto& [key, c] : detail::reduce_a_powers(A.l, B.l, q)) {
        AlgMono mono{key.first, A.m + B.m + key.second, A.n + B.n + key.second};
        out.terms[mono] += coeff * phase * c;
    }
    out.prune();
    return out;
}

inline AlgebraElement alg_mul(const AlgebraElement& x, const AlgebraElement& y, double q) {
    AlgebraElement out;
    for (auto& [ma, ca] : x.terms)
        for (auto& [mb, cb] : y.terms) {
            AlgebraElement part = alg_mul_mono(ma, mb, ca * cb, q);
            for (auto& [m, c] : part.terms) out.terms[m] += c;
        }
    out.prune();
    return out;
}

// (a^l b^m (b*)^n)* = q^{-l(m+n)} a^{-l} b^n (b*)^m
inline AlgebraElement alg_star(const AlgebraElement& x, double q) {
    AlgebraElement out;
    for (auto& [m, c] : x.terms) {
        double phase = std::pow(q, -double(m.l) * double(m.m + m.n));
        out.terms[AlgMono{-m.l, m.n, m.m}] += std::conj(c) * phase;
    }
    out.prune();
    return out;
}

// Free *-words in the four coordinate generators.
enum class AGen { a, b, a_star, b_star };

inline AlgMono generator_mono(AGen g) {
    switch (g) {
        case AGen::a: return {1, 0, 0};
        case AGen::b: return {0, 1, 0};
        case AGen::a_star: return {-1, 0, 0};
        case AGen::b_star: return {0, 0, 1};
    }
    return {};
}

// Confluent rewriting of a free word into the PBW basis (left fold over the
// one-step products, which are already canonical).
inline AlgebraElement normal_form(const std::vector<AGen>& word, double q) {
    AlgebraElement acc = AlgebraElement::one();
    for (AGen g : word) acc = alg_mul(acc, AlgebraElement::monomial(generator_mono(g)), q);
    return acc;
}

// ---------------------------------------------------------------------------
// Disk algebra: a^k b^m with b self-adjoint, relations b a = q a b,
// a*a + q^2 b^2 = 1, a a* + b^2 = 1.

struct DiskMono {
    int k = 0;  // signed a-power
    int m = 0;  // b-power
    auto operator<=>(const DiskMono&) const = default;
};

class DiskElement {
  public:
    std::map<DiskMono, cplx> terms;

    static DiskElement zero() { return {}; }
    static DiskElement one() { return monomial({0, 0}); }
    static DiskElement monomial(DiskMono m, cplx c = 1.0) {
        DiskElement e;
        if (c != 0.0) e.terms[m] = c;
        return e;
    }

    DiskElement& prune(double eps = 1e-300) {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
        return *this;
    }

    DiskElement operator+(const DiskElement& o) const {
        DiskElement r = *this;
        for (auto& [m, c] : o.terms) r.terms[m] += c;
        r.prune();
        return r;
    }
    DiskElement operator*(cplx c) const {
        DiskElement r;
        for (auto& [m, cc] : terms)
            if (cc * c != 0.0) r.terms[m] = cc * c;
        return r;
    }
};

inline double disk_distance(const DiskElement& x, const DiskElement& y) {
    DiskElement d = x + y * cplx(-1.0);
    double sup = 0;
    for (auto& [m, c] : d.terms) sup = std::max(sup, std::abs(c));
    return sup;
}

namespace detail {

inline std::map<std::pair<int, int>, double> reduce_disk_a_powers(int l, int lp, double q) {
    // second component counts b^2 factors
    std::map<std::pair<int, int>, double> out;
    if (l == 0 || lp == 0 || (l > 0) == (lp > 0)) {
        out[{l + lp, 0}] = 1.0;
        return out;
    }
    if (l > 0) {  // a^l (a*)^k, a a* = 1 - b^2, b^2 a* = q^{-2} a* b^2
        int k = -lp;
        auto rec = reduce_disk_a_powers(l - 1, lp + 1, q);
        for (auto& [key, c] : rec) {
            out[key] += c;
            out[{key.first, key.second + 1}] -= c * std::pow(q, -2.0 * (k - 1));
        }
        return out;
    }
    // (a*)^k a^{l'}, a* a = 1 - q^2 b^2, b^2 a = q^2 a b^2
    auto rec = reduce_disk_a_powers(l + 1, lp - 1, q);
    for (auto& [key, c] : rec) {
        out[key] += c;
        out[{key.first, key.second + 1}] -= c * std::pow(q, 2.0 * lp);
    }
    return out;
}

}  // namespace detail

inline DiskElement disk_mul_mono(const DiskMono& A, const DiskMono& B, cplx coeff, double q) {
    double phase = std::pow(q, double(B.k) * double(A.m));  // b^m a^k = q^{km} a^k b^m
    DiskElement out;
    for (auto& [key, c] : detail::reduce_disk_a_powers(A.k, B.k, q))
        out.terms[DiskMono{key.first, A.m + B.m + 2 * key.second}] += coeff * phase * c;
    out.prune();
    return out;
}

inline DiskElement disk_mul(const DiskElement& x, const DiskElement& y, double q) {
    DiskElement out;
    for (auto& [ma, ca] : x.terms)
        for (auto& [mb, cb] : y.terms) {
            DiskElement part = disk_mul_mono(ma, mb, ca * cb, q);
            for (auto& [m, c] : part.terms) out.terms[m] += c;
        }
    out.prune();
    return out;
}

// (a^k b^m)* = q^{-km} a^{-k} b^m
inline std::pair<DiskMono, cplx> disk_star_mono(const DiskMono& m, cplx c, double q) {
    return {DiskMono{-m.k, m.m}, std::conj(c) * std::pow(q, -double(m.k) * double(m.m))};
}

inline DiskElement disk_star(const DiskElement& x, double q) {
    DiskElement out;
    for (auto& [m, c] : x.terms) {
        auto [sm, sc] = disk_star_mono(m, c, q);
        out.terms[sm] += sc;
    }
    out.prune();
    return out;
}

enum class DiskSide { plus, minus };

// Quotient map r_pm: send b* to b.  The normal form is side-independent; the
// side matters once representations or trace functionals are applied.
inline DiskElement restrict_disk(const AlgebraElement& x, DiskSide /*side*/) {
    DiskElement out;
    for (auto& [m, c] : x.terms) out.terms[DiskMono{m.l, m.m + m.n}] += c;
    out.prune();
    return out;
}

// Circle symbol: a -> u, b -> 0; returns a Laurent polynomial in u.
inline std::map<int, cplx> circle_symbol(const DiskElement& x) {
    std::map<int, cplx> out;
    for (auto& [m, c] : x.terms)
        if (m.m == 0) out[m.k] += c;
    for (auto it = out.begin(); it != out.end();)
        it = it->second == 0.0 ? out.erase(it) : std::next(it);
    return out;
}

// ---------------------------------------------------------------------------
// Words over the generators of B (images of delta^n of the algebra):
// the tilde generators, the off-diagonal corner operators, and adjoints.

enum class BGen { a_tilde_plus, a_tilde_minus, b_tilde_plus, b_tilde_minus, off_a, off_b };

struct BSym {
    BGen g = BGen::a_tilde_plus;
    bool star = false;
    auto operator<=>(const BSym&) const = default;
};

using BWord = std::vector<BSym>;

class BElement {
  public:
    std::map<BWord, cplx> terms;

    static BElement zero() { return {}; }
    static BElement one() { return word({}); }
    static BElement word(BWord w, cplx c = 1.0) {
        BElement e;
        if (c != 0.0) e.terms[std::move(w)] = c;
        return e;
    }
    static BElement generator(BGen g, bool star = false) { return word({BSym{g, star}}); }

    BElement operator+(const BElement& o) const {
        BElement r = *this;
        for (auto& [w, c] : o.terms) r.terms[w] += c;
        r.prune();
        return r;
    }
    BElement operator*(cplx c) const {
        BElement r;
        for (auto& [w, cc] : terms)
            if (cc * c != 0.0) r.terms[w] = cc * c;
        return r;
    }
    BElement& prune(double eps = 1e-300) {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
        return *this;
    }
};

inline BElement b_mul(const BElement& x, const BElement& y) {
    BElement out;
    for (auto& [wa, ca] : x.terms)
        for (auto& [wb, cb] : y.terms) {
            BWord w = wa;
            w.insert(w.end(), wb.begin(), wb.end());
            out.terms[std::move(w)] += ca * cb;
        }
    out.prune();
    return out;
}

inline BElement b_star(const BElement& x) {
    BElement out;
    for (auto& [w, c] : x.terms) {
        BWord r(w.rbegin(), w.rend());
        for (auto& s : r) s.star = !s.star;
        out.terms[std::move(r)] += std::conj(c);
    }
    return out;
}

// delta acts on each generator as multiplication by its winding weight, so on
// a word it multiplies by the total weight.
inline int delta_weight(const BSym& s) {
    int w = 0;
    switch (s.g) {
        case BGen::a_tilde_plus:
        case BGen::b_tilde_plus: w = 1; break;
        case BGen::a_tilde_minus:
        case BGen::b_tilde_minus: w = -1; break;
        case BGen::off_a:
        case BGen::off_b: w = 0; break;
    }
    return s.star ? -w : w;
}

inline int word_weight(const BWord& w) {
    int acc = 0;
    for (auto& s : w) acc += delta_weight(s);
    return acc;
}

inline BElement b_delta(const BElement& x, int power = 1) {
    BElement out;
    for (auto& [w, c] : x.terms) {
        double wt = std::pow(double(word_weight(w)), power);
        if (wt != 0.0) out.terms[w] = c * wt;
    }
    return out;
}

// pi(x) as a B-element: a -> a~_+ + a~_- + off_a and likewise for b, with
// adjoints for the starred generators.  Exact as operators.
inline BElement pi_to_b(AGen g) {
    switch (g) {
        case AGen::a:
            return BElement::generator(BGen::a_tilde_plus) + BElement::generator(BGen::a_tilde_minus) +
                   BElement::generator(BGen::off_a);
        case AGen::b:
            return BElement::generator(BGen::b_tilde_plus) + BElement::generator(BGen::b_tilde_minus) +
                   BElement::generator(BGen::off_b);
        case AGen::a_star: return b_star(pi_to_b(AGen::a));
        case AGen::b_star: return b_star(pi_to_b(AGen::b));
    }
    return BElement::zero();
}

inline BElement pi_to_b(const AlgebraElement& x) {
    BElement out;
    for (auto& [m, c] : x.terms) {
        BElement acc = BElement::one() * c;
        for (int i = 0; i < std::abs(m.l); ++i)
            acc = b_mul(acc, pi_to_b(m.l > 0 ? AGen::a : AGen::a_star));
        for (int i = 0; i < m.m; ++i) acc = b_mul(acc, pi_to_b(AGen::b));
        for (int i = 0; i < m.n; ++i) acc = b_mul(acc, pi_to_b(AGen::b_star));
        out = out + acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cosphere elements: finite sums over (disk+ monomial, disk- monomial,
// winding), graded by the winding.

struct CosMono {
    DiskMono plus, minus;
    int w = 0;
    auto operator<=>(const CosMono&) const = default;
};

class CosphereElement {
  public:
    std::map<CosMono, cplx> terms;

    static CosphereElement zero() { return {}; }
    static CosphereElement one() { return monomial({}); }
    static CosphereElement monomial(CosMono m, cplx c = 1.0) {
        CosphereElement e;
        if (c != 0.0) e.terms[m] = c;
        return e;
    }

    CosphereElement operator+(const CosphereElement& o) const {
        CosphereElement r = *this;
        for (auto& [m, c] : o.terms) r.terms[m] += c;
        r.prune();
        return r;
    }
    CosphereElement operator*(cplx c) const {
        CosphereElement r;
        for (auto& [m, cc] : terms)
            if (cc * c != 0.0) r.terms[m] = cc * c;
        return r;
    }
    CosphereElement& prune(double eps = 1e-300) {
        for (auto it = terms.begin(); it != terms.end();)
            it = std::abs(it->second) < eps ? terms.erase(it) : std::next(it);
        return *this;
    }
};

inline double cosphere_distance(const CosphereElement& x, const CosphereElement& y) {
    CosphereElement d = x + y * cplx(-1.0);
    double sup = 0;
    for (auto& [m, c] : d.terms) sup = std::max(sup, std::abs(c));
    return sup;
}

inline CosphereElement cos_mul(const CosphereElement& x, const CosphereElement& y, double q) {
    CosphereElement out;
    for (auto& [ma, ca] : x.terms)
        for (auto& [mb, cb] : y.terms) {
            DiskElement p = disk_mul_mono(ma.plus, mb.plus, 1.0, q);
            DiskElement m = disk_mul_mono(ma.minus, mb.minus, 1.0, q);
            for (auto& [pm, pc] : p.terms)
                for (auto& [mm, mc] : m.terms)
                    out.terms[CosMono{pm, mm, ma.w + mb.w}] += ca * cb * pc * mc;
        }
    out.prune();
    return out;
}

inline CosphereElement cos_star(const CosphereElement& x, double q) {
    CosphereElement out;
    for (auto& [m, c] : x.terms) {
        auto [pp, pc] = disk_star_mono(m.plus, 1.0, q);
        auto [mm, mc] = disk_star_mono(m.minus, 1.0, q);
        out.terms[CosMono{pp, mm, -m.w}] += std::conj(c) * pc * mc;
    }
    out.prune();
    return out;
}

// delta acts on the symbol side as the grading derivation: each winding-w
// monomial is multiplied by w^power.
inline CosphereElement cos_delta(const CosphereElement& x, int power = 1) {
    CosphereElement out;
    for (auto& [m, c] : x.terms) {
        double wt = std::pow(double(m.w), power);
        if (wt != 0.0) out.terms[m] = c * wt;
    }
    return out;
}

// Restriction to winding w = 0 (the degree-zero part of the grading).
inline CosphereElement degree0(const CosphereElement& x) {
    CosphereElement out;
    for (auto& [m, c] : x.terms)
        if (m.w == 0) out.terms[m] = c;
    return out;
}

// Generator images of rho; the off-diagonal corner generators map to zero.
inline CosphereElement rho_image(const BSym& s, double q) {
    CosphereElement im;
    switch (s.g) {
        case BGen::a_tilde_plus:
            im = CosphereElement::monomial({{1, 0}, {1, 0}, 1});
            break;
        case BGen::a_tilde_minus:
            im = CosphereElement::monomial({{0, 1}, {0, 1}, -1}, -q);
            break;
        case BGen::b_tilde_plus:
            im = CosphereElement::monomial({{1, 0}, {0, 1}, 1}, -1.0);
            break;
        case BGen::b_tilde_minus:
            im = CosphereElement::monomial({{0, 1}, {-1, 0}, -1}, -1.0);
            break;
        case BGen::off_a:
        case BGen::off_b: return CosphereElement::zero();
    }
    return s.star ? cos_star(im, q) : im;
}

inline CosphereElement rho(const BElement& x, double q) {
    CosphereElement out;
    for (auto& [w, c] : x.terms) {
        CosphereElement acc = CosphereElement::one() * c;
        for (auto& s : w) {
            acc = cos_mul(acc, rho_image(s, q), q);
            if (acc.terms.empty()) break;
        }
        out = out + acc;
    }
    return out;
}

// Cosphere image of one coordinate generator (the off-diagonal corner parts
// die inside rho, so only the two tilde pieces contribute).
inline CosphereElement generator_symbol(AGen g, double q) {
    switch (g) {
        case AGen::a:
            return rho_image(BSym{BGen::a_tilde_plus, false}, q) +
                   rho_image(BSym{BGen::a_tilde_minus, false}, q);
        case AGen::b:
            return rho_image(BSym{BGen::b_tilde_plus, false}, q) +
                   rho_image(BSym{BGen::b_tilde_minus, false}, q);
        case AGen::a_star: return cos_star(generator_symbol(AGen::a, q), q);
        case AGen::b_star: return cos_star(generator_symbol(AGen::b, q), q);
    }
    return CosphereElement::zero();
}

// Symbol of pi(x): the image of the diagonal part of pi(x) under rho.  The
// fold over generator symbols agrees with rho(pi_to_b(x)) because rho is a
// homomorphism killing the off-diagonal corners.
inline CosphereElement symbol_of_pi(const AlgebraElement& x, double q) {
    CosphereElement out;
    for (auto& [m, c] : x.terms) {
        CosphereElement acc = CosphereElement::one() * c;
        for (int i = 0; i < std::abs(m.l); ++i)
            acc = cos_mul(acc, generator_symbol(m.l > 0 ? AGen::a : AGen::a_star, q), q);
        for (int i = 0; i < m.m; ++i) acc = cos_mul(acc, generator_symbol(AGen::b, q), q);
        for (int i = 0; i < m.n; ++i) acc = cos_mul(acc, generator_symbol(AGen::b_star, q), q);
        out = out + acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Textual parser.  Words in {a, b, a*, b*, a~+, a~-, b~+, b~-} with integer
// coefficients and q-powers; juxtaposition is product, ^ is power, a star
// suffix is the adjoint.  The UTF-8 spellings of the tilde generators are
// accepted as aliases.

using ParsedElement = std::variant<AlgebraElement, BElement>;

namespace detail {

inline std::string normalize_word_input(std::string s) {
    auto replace_all = [&](const std::string& from, const std::string& to) {
        std::size_t pos = 0;
        while ((pos = s.find(from, pos)) != std::string::npos) {
            s.replace(pos, from.size(), to);
            pos += to.size();
        }
    };
    replace_all("\xc3\xa3", "a~");      // a with tilde
    replace_all("b\xcc\x83", "b~");     // b + combining tilde
    replace_all("\xe2\x88\x92", "-");   // unicode minus
    return s;
}

}  // namespace detail

inline ParsedElement parse_element(const std::string& input, double q) {
    const std::string s = detail::normalize_word_input(input);
    std::size_t i = 0;
    auto skip_ws = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
    auto fail = [&](const std::string& what) -> void {
        throw std::invalid_argument("parse_element: " + what + " at position " + std::to_string(i));
    };

    auto parse_int = [&]() -> long {
        skip_ws();
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail("expected integer");
        long v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = v * 10 + (s[i++] - '0');
        return neg ? -v : v;
    };

    struct Factor {
        bool tilde = false;
        AGen plain = AGen::a;
        BSym bsym;
        int power = 1;
    };

    bool any_tilde = false, any_plain = false;
    AlgebraElement alg = AlgebraElement::zero();
    BElement bel = BElement::zero();

    skip_ws();
    bool first_term = true;
    while (i < s.size()) {
        double sign = 1.0;
        skip_ws();
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else if (!first_term) {
            fail("expected + or - between terms");
        }
        first_term = false;
        skip_ws();

        double coeff = sign;
        bool saw_content = false;
        // integer coefficient
        if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            coeff *= double(parse_int());
            saw_content = true;
        }
        skip_ws();
        // q-power
        if (i < s.size() && s[i] == 'q') {
            ++i;
            long e = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                e = parse_int();
            }
            coeff *= std::pow(q, double(e));
            saw_content = true;
        }

        std::vector<Factor> factors;
        while (true) {
            skip_ws();
            if (i >= s.size() || s[i] == '+' || s[i] == '-') break;
            Factor f;
            char c = s[i];
            if (c != 'a' && c != 'b') fail("expected generator a or b");
            ++i;
            bool is_b = c == 'b';
            if (i < s.size() && s[i] == '~') {
                ++i;
                if (i >= s.size() || (s[i] != '+' && s[i] != '-')) fail("tilde generator needs + or -");
                bool plus = s[i++] == '+';
                f.tilde = true;
                f.bsym.g = is_b ? (plus ? BGen::b_tilde_plus : BGen::b_tilde_minus)
                                : (plus ? BGen::a_tilde_plus : BGen::a_tilde_minus);
            } else {
                f.plain = is_b ? AGen::b : AGen::a;
            }
            if (i < s.size() && s[i] == '*') {
                ++i;
                if (f.tilde)
                    f.bsym.star = true;
                else
                    f.plain = is_b ? AGen::b_star : AGen::a_star;
            }
            if (i < s.size() && s[i] == '^') {
                ++i;
                long p = parse_int();
                if (p < 0) fail("negative powers are not part of the grammar");
                f.power = int(p);
            }
            (f.tilde ? any_tilde : any_plain) = true;
            factors.push_back(f);
            saw_content = true;
        }
        if (!saw_content) fail("empty term");
        if (any_tilde && any_plain)
            throw std::invalid_argument("parse_element: cannot mix plain and tilde generators");

        if (any_tilde) {
            BElement term = BElement::one() * cplx(coeff);
            for (auto& f : factors)
                for (int p = 0; p < f.power; ++p) term = b_mul(term, BElement::word({f.bsym}));
            bel = bel + term;
        } else {
            AlgebraElement term = AlgebraElement::one() * cplx(coeff);
            for (auto& f : factors)
                for (int p = 0; p < f.power; ++p)
                    term = alg_mul(term, AlgebraElement::monomial(generator_mono(f.plain)), q);
            alg = alg + term;
        }
        skip_ws();
    }

    if (any_tilde) return bel;
    return alg;
}

}  // namespace suq2
