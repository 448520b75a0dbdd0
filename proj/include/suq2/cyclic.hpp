#pragma once

// The (b, B) bicomplex operators on numerically evaluable cochains and the
// cocycle-identity test harness over the low-degree monomial lattice.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "suq2/index.hpp"

namespace suq2 {

// An arity-n cochain takes n+1 algebra arguments.
struct Cochain {
    int arity = 0;
    std::function<cplx(const std::vector<AlgebraElement>&)> eval;
    std::string label;
};

// Hochschild coboundary:
//   b phi(a_0,...,a_{n+1}) = sum_j (-1)^j phi(a_0,...,a_j a_{j+1},...,a_{n+1})
//                            + (-1)^{n+1} phi(a_{n+1} a_0, a_1,...,a_n).
inline Cochain hochschild_b(const Cochain& phi, double q) {
    Cochain out;
    out.arity = phi.arity + 1;
    out.label = "b(" + phi.label + ")";
    out.eval = [phi, q](const std::vector<AlgebraElement>& args) {
        const int n = int(args.size()) - 2;
        cplx acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            std::vector<AlgebraElement> sub;
            sub.reserve(n + 1);
            for (int i = 0; i < j; ++i) sub.push_back(args[i]);
            sub.push_back(alg_mul(args[j], args[j + 1], q));
            for (int i = j + 2; i <= n + 1; ++i) sub.push_back(args[i]);
            acc += (j % 2 ? -1.0 : 1.0) * phi.eval(sub);
        }
        std::vector<AlgebraElement> wrap;
        wrap.reserve(n + 1);
        wrap.push_back(alg_mul(args[n + 1], args[0], q));
        for (int i = 1; i <= n; ++i) wrap.push_back(args[i]);
        acc += ((n + 1) % 2 ? -1.0 : 1.0) * phi.eval(wrap);
        return acc;
    };
    return out;
}

// B = N B_0 with
//   (B_0 phi)(a_0,...,a_{n-1}) = phi(1,a_0,...,a_{n-1}) - (-1)^n phi(a_0,...,a_{n-1},1)
//   (N psi)(a_0,...,a_{n-1})   = sum_j (-1)^{(n-1) j} psi(a_j,...,a_{n-1},a_0,...,a_{j-1}).
inline Cochain connes_B(const Cochain& phi) {
    if (phi.arity < 1) throw std::invalid_argument("connes_B: needs arity >= 1");
    Cochain out;
    out.arity = phi.arity - 1;
    out.label = "B(" + phi.label + ")";
    const int n = phi.arity;
    out.eval = [phi, n](const std::vector<AlgebraElement>& args) {
        auto b0 = [&](const std::vector<AlgebraElement>& xs) {
            std::vector<AlgebraElement> front;
            front.reserve(n + 1);
            front.push_back(AlgebraElement::one());
            for (auto& x : xs) front.push_back(x);
            std::vector<AlgebraElement> back = xs;
            back.push_back(AlgebraElement::one());
            return phi.eval(front) - (n % 2 ? -1.0 : 1.0) * phi.eval(back);
        };
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            std::vector<AlgebraElement> rot;
            rot.reserve(n);
            for (int i = 0; i < n; ++i) rot.push_back(args[(j + i) % n]);
            double sign = ((n - 1) * j) % 2 ? -1.0 : 1.0;
            acc += sign * b0(rot);
        }
        return acc;
    };
    return out;
}

// (lambda phi)(a_0,...,a_n) = (-1)^n phi(a_n, a_0,...,a_{n-1}).
inline Cochain lambda_op(const Cochain& phi) {
    Cochain out;
    out.arity = phi.arity;
    out.label = "lambda(" + phi.label + ")";
    const int n = phi.arity;
    out.eval = [phi, n](const std::vector<AlgebraElement>& args) {
        std::vector<AlgebraElement> rot;
        rot.reserve(n + 1);
        rot.push_back(args[n]);
        for (int i = 0; i < n; ++i) rot.push_back(args[i]);
        return (n % 2 ? -1.0 : 1.0) * phi.eval(rot);
    };
    return out;
}

// ---------------------------------------------------------------------------
// Linear functionals cached per PBW monomial (phi_0', beta and friends come
// from level-trace fits, so memoization matters on the lattice).
class CachedFunctional {
  public:
    explicit CachedFunctional(std::function<cplx(const AlgMono&)> on_mono)
        : on_mono_(std::move(on_mono)) {}

    cplx operator()(const AlgebraElement& x) const {
        cplx acc = 0.0;
        for (auto& [m, c] : x.terms) {
            auto it = cache_.find(m);
            if (it == cache_.end()) it = cache_.emplace(m, on_mono_(m)).first;
            acc += c * it->second;
        }
        return acc;
    }

  private:
    std::function<cplx(const AlgMono&)> on_mono_;
    mutable std::map<AlgMono, cplx> cache_;
};

// ---------------------------------------------------------------------------
// The registered cochains and the identity suite.

struct CocycleCheck {
    std::string name;
    double residual = 0.0;
    int samples = 0;
};

struct CocycleReport {
    std::vector<CocycleCheck> checks;
    double max_residual() const {
        double m = 0;
        for (auto& c : checks) m = std::max(m, c.residual);
        return m;
    }
};

struct CocycleOptions {
    double q = 0.5;
    int zeta_levels = 60;     // ladder for the z = 0 evaluations
    int chi_levels = 50;      // ladder for chi_1 traces
    int sample_tuples = 120;  // arity >= 2 identities sample this many tuples
    unsigned seed = 2024;
};

// Normal-form monomials of total degree <= 2, the evaluation lattice.
inline std::vector<AlgebraElement> degree_two_lattice() {
    std::vector<AlgebraElement> out;
    for (int l = -2; l <= 2; ++l)
        for (int m = 0; m + std::abs(l) <= 2; ++m)
            for (int n = 0; n + m + std::abs(l) <= 2; ++n)
                out.push_back(AlgebraElement::monomial({l, m, n}));
    return out;
}

inline CocycleReport cocycle_suite(const CocycleOptions& opt) {
    const double q = opt.q;
    CocycleReport rep;
    std::mt19937_64 rng(opt.seed);
    auto lattice = degree_two_lattice();
    std::uniform_int_distribution<std::size_t> pick(0, lattice.size() - 1);

    // the registered cochains
    Cochain psi1_c{1, [q](const std::vector<AlgebraElement>& a) { return psi1(a[0], a[1], q); },
                   "psi1"};
    Cochain phi1_c{1, [q](const std::vector<AlgebraElement>& a) { return phi1_delta(a[0], a[1], q); },
                   "phi1"};
    Cochain phi2_c{2,
                   [q](const std::vector<AlgebraElement>& a) { return phi2(a[0], a[1], a[2], q); },
                   "phi2"};
    Cochain phi2p_c{
        2, [q](const std::vector<AlgebraElement>& a) { return phi2_prime(a[0], a[1], a[2], q); },
        "phi2'"};
    Cochain phi3_c{3,
                   [q](const std::vector<AlgebraElement>& a) {
                       return phi3(a[0], a[1], a[2], a[3], q);
                   },
                   "phi3"};
    CachedFunctional phi0p_fn([q, K = opt.zeta_levels](const AlgMono& m) {
        return phi0_prime(AlgebraElement::monomial(m), q, K);
    });
    Cochain phi0p_c{0, [phi0p_fn](const std::vector<AlgebraElement>& a) { return phi0p_fn(a[0]); },
                    "phi0'"};
    CachedFunctional beta_fn([q, K = opt.zeta_levels](const AlgMono& m) {
        return beta(AlgebraElement::monomial(m), q, K);
    });
    Cochain beta_c{0, [beta_fn](const std::vector<AlgebraElement>& a) { return beta_fn(a[0]); },
                   "beta"};
    Cochain chi1_c{1,
                   [q, K = opt.chi_levels](const std::vector<AlgebraElement>& a) {
                       return chi1_numeric(a[0], a[1], q, K);
                   },
                   "chi1"};
    Cochain tau_odd_c{1,
                      [q](const std::vector<AlgebraElement>& a) { return tau_odd(a[0], a[1], q); },
                      "tau_odd"};

    auto sample_tuple = [&](int count) {
        std::vector<AlgebraElement> t;
        for (int i = 0; i < count; ++i) t.push_back(lattice[pick(rng)]);
        return t;
    };

    auto run_check = [&](const std::string& name, int arity_args, auto&& fn) {
        CocycleCheck chk;
        chk.name = name;
        for (int s = 0; s < opt.sample_tuples; ++s) {
            auto args = sample_tuple(arity_args);
            chk.residual = std::max(chk.residual, std::abs(fn(args)));
            ++chk.samples;
        }
        rep.checks.push_back(chk);
    };

    // phi3 = b phi2 and phi3 + b phi2' = 0
    {
        Cochain b_phi2 = hochschild_b(phi2_c, q);
        Cochain b_phi2p = hochschild_b(phi2p_c, q);
        run_check("phi3 = b phi2", 4, [&](const std::vector<AlgebraElement>& a) {
            return phi3_c.eval(a) - b_phi2.eval(a);
        });
        run_check("phi3 + b phi2' = 0", 4, [&](const std::vector<AlgebraElement>& a) {
            return phi3_c.eval(a) + b_phi2p.eval(a);
        });
    }

    // phi1 + b phi0' + B phi2' = psi1 on the full pair lattice
    {
        Cochain b_phi0p = hochschild_b(phi0p_c, q);
        Cochain B_phi2p = connes_B(phi2p_c);
        CocycleCheck chk;
        chk.name = "phi1 + b phi0' + B phi2' = psi1";
        for (auto& x : lattice)
            for (auto& y : lattice) {
                std::vector<AlgebraElement> args = {x, y};
                cplx v = phi1_c.eval(args) + b_phi0p.eval(args) + B_phi2p.eval(args) -
                         psi1_c.eval(args);
                chk.residual = std::max(chk.residual, std::abs(v));
                ++chk.samples;
            }
        rep.checks.push_back(chk);
    }

    // B phi2' against its closed form
    {
        Cochain B_phi2p = connes_B(phi2p_c);
        CocycleCheck chk;
        chk.name = "B phi2' closed form";
        for (auto& x : lattice)
            for (auto& y : lattice) {
                std::vector<AlgebraElement> args = {x, y};
                cplx v = B_phi2p.eval(args) - connes_B_phi2_prime_closed(x, y, q);
                chk.residual = std::max(chk.residual, std::abs(v));
                ++chk.samples;
            }
        rep.checks.push_back(chk);
    }

    // psi1 is a (b, B) cocycle
    {
        Cochain b_psi1 = hochschild_b(psi1_c, q);
        run_check("b psi1 = 0", 3,
                  [&](const std::vector<AlgebraElement>& a) { return b_psi1.eval(a); });
        Cochain B_psi1 = connes_B(psi1_c);
        CocycleCheck chk;
        chk.name = "B psi1 = 0";
        for (auto& x : lattice) {
            chk.residual = std::max(chk.residual, std::abs(B_psi1.eval({x})));
            ++chk.samples;
        }
        rep.checks.push_back(chk);
    }

    // bB + Bb = 0 and B^2 = 0, exercised on phi2
    {
        Cochain bB = hochschild_b(connes_B(phi2_c), q);
        Cochain Bb = connes_B(hochschild_b(phi2_c, q));
        run_check("bB + Bb = 0 on phi2", 3, [&](const std::vector<AlgebraElement>& a) {
            return bB.eval(a) + Bb.eval(a);
        });
        Cochain BB = connes_B(connes_B(phi2_c));
        CocycleCheck chk;
        chk.name = "B^2 = 0 on phi2";
        for (auto& x : lattice) {
            chk.residual = std::max(chk.residual, std::abs(BB.eval({x})));
            ++chk.samples;
        }
        rep.checks.push_back(chk);
    }

    // b^2 = 0 on a 0-cochain evaluated at triples
    {
        Cochain bb = hochschild_b(hochschild_b(phi0p_c, q), q);
        run_check("b^2 phi0' = 0", 3,
                  [&](const std::vector<AlgebraElement>& a) { return bb.eval(a); });
    }

    // b beta agrees with the two-term formula
    {
        Cochain b_beta = hochschild_b(beta_c, q);
        CocycleCheck chk;
        chk.name = "b beta(a0,a1) = beta(a0 a1) - beta(a1 a0)";
        for (auto& x : lattice)
            for (auto& y : lattice) {
                cplx direct = beta_fn(alg_mul(x, y, q)) - beta_fn(alg_mul(y, x, q));
                chk.residual =
                    std::max(chk.residual, std::abs(b_beta.eval({x, y}) - direct));
                ++chk.samples;
            }
        rep.checks.push_back(chk);
    }

    // cyclicity: lambda chi1 = chi1 on pairs with convergent traces
    {
        Cochain l_chi1 = lambda_op(chi1_c);
        std::vector<std::pair<AlgebraElement, AlgebraElement>> pairs = {
            {AlgebraElement::monomial({-1, 0, 0}), AlgebraElement::monomial({1, 0, 0})},
            {AlgebraElement::monomial({0, 1, 0}), AlgebraElement::monomial({0, 0, 1})},
            {AlgebraElement::monomial({0, 1, 1}), AlgebraElement::monomial({0, 1, 1})},
        };
        CocycleCheck chk;
        chk.name = "lambda chi1 = chi1";
        for (auto& [x, y] : pairs) {
            std::vector<AlgebraElement> args = {x, y};
            chk.residual =
                std::max(chk.residual, std::abs(l_chi1.eval(args) - chi1_c.eval(args)));
            ++chk.samples;
        }
        rep.checks.push_back(chk);
    }

    // lambda^2 = id on 1-cochains
    {
        Cochain ll = lambda_op(lambda_op(psi1_c));
        CocycleCheck chk;
        chk.name = "lambda^2 = id on psi1";
        for (int s = 0; s < 40; ++s) {
            auto args = sample_tuple(2);
            chk.residual = std::max(chk.residual, std::abs(ll.eval(args) - psi1_c.eval(args)));
            ++chk.samples;
        }
        rep.checks.push_back(chk);
    }

    // lambda tau_odd = tau_odd in closed form
    {
        Cochain l_tau = lambda_op(tau_odd_c);
        CocycleCheck chk;
        chk.name = "lambda tau_odd = tau_odd";
        for (auto& x : lattice)
            for (auto& y : lattice) {
                std::vector<AlgebraElement> args = {x, y};
                chk.residual =
                    std::max(chk.residual, std::abs(l_tau.eval(args) - tau_odd_c.eval(args)));
                ++chk.samples;
            }
        rep.checks.push_back(chk);
    }

    return rep;
}

}  // namespace suq2
