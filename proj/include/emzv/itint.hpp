#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"

namespace emzv {

// Algebra hooks.  Scalars are handled here; other coefficient algebras
// (NcSeries) provide the same three functions next to their definition.
template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

template <class A>
    requires(std::is_arithmetic_v<A> || is_complex<A>::value)
A algebra_unit(const A&) {
    return A(1);
}
template <class A>
    requires(std::is_arithmetic_v<A> || is_complex<A>::value)
A algebra_zero(const A&) {
    return A(0);
}
template <class A>
    requires(std::is_arithmetic_v<A> || is_complex<A>::value)
double algebra_norm(const A& a) {
    return static_cast<double>(std::abs(a));
}

/// 1-form  omega = f(z) dz  with values in the algebra A and endpoint charge
/// alpha: along the path, omega = d(alpha log(t - c)) + O(1) dt at each end.
template <class A, class Real = double>
struct RegForm {
    std::function<A(const PathPoint<Real>&)> eval;
    A charge;

    /// Form given as a function of z only.
    static RegForm of_z(std::function<A(std::complex<Real>)> f, A charge) {
        return {[f](const PathPoint<Real>& p) { return f(p.z); }, charge};
    }
};

/// The regularising function l (scalar valued, multiplied by the charge) and
/// its z-derivative.
template <class A, class Real = double>
struct Regulator {
    std::function<std::complex<Real>(const PathPoint<Real>&)> ell;
    std::function<std::complex<Real>(const PathPoint<Real>&)> dell;
    A charge;
};

template <class A>
struct IntegralValue {
    A value;
    double est_error = 0;
};

namespace detail {

template <class A>
bool same_charge(const A& a, const A& b) {
    return algebra_norm(a - b) <= 1e-14 * (1 + algebra_norm(a));
}

template <class A>
A power(const A& x, int k) {
    A r = algebra_unit(x);
    for (int i = 0; i < k; ++i) r = r * x;
    return r;
}

template <class A, class Real>
A reg_integral_on(const SampledPath<Real>& path, const std::vector<RegForm<A, Real>>& forms,
                  const Regulator<A, Real>& reg) {
    const std::size_t n = forms.size();
    const A& alpha = reg.charge;
    const A zero = algebra_zero(alpha);
    if (n == 0) return algebra_unit(alpha);
    for (const auto& f : forms)
        if (!same_charge(f.charge, alpha)) throw ContractError("reg_iterated_integral: incompatible charges");
    const auto& pts = path.points();
    const std::size_t N = pts.size();
    // node values: forms (times gamma'), alpha l and alpha dl (times gamma')
    std::vector<std::vector<A>> F(n, std::vector<A>(N, zero));
    std::vector<A> aL(N, zero), adL(N, zero);
    for (std::size_t i = 0; i < N; ++i) {
        const auto& p = pts[i];
        for (std::size_t k = 0; k < n; ++k) F[k][i] = forms[k].eval(p) * p.dz;
        aL[i] = reg.ell(p) * alpha;
        adL[i] = (reg.dell(p) * p.dz) * alpha;
    }
    std::vector<std::vector<A>> aLpow(n, std::vector<A>(N, zero));
    for (std::size_t i = 0; i < N; ++i) {
        A cur = algebra_unit(alpha);
        for (std::size_t k = 0; k < n; ++k) {
            aLpow[k][i] = cur;
            cur = cur * aL[i];
        }
    }
    A total = zero;
    double fact_a = 1;
    for (std::size_t a = 0; a < n; ++a) {
        if (a > 0) fact_a *= double(a);
        double fact_b = 1;
        for (std::size_t b = 0; a + b < n; ++b) {
            if (b > 0) fact_b *= double(b);
            const std::size_t m = n - a - b;
            std::vector<std::vector<A>> mod;  // modified first/last integrands
            std::vector<const std::vector<A>*> seq;
            mod.reserve(2);
            if (m == 1) {
                std::vector<A> g(N, zero);
                for (std::size_t i = 0; i < N; ++i) g[i] = aLpow[b][i] * (F[a][i] - adL[i]) * aLpow[a][i];
                mod.push_back(std::move(g));
                seq.push_back(&mod.back());
            } else {
                std::vector<A> g1(N, zero), gm(N, zero);
                for (std::size_t i = 0; i < N; ++i) {
                    g1[i] = (F[a][i] - adL[i]) * aLpow[a][i];
                    gm[i] = aLpow[b][i] * (F[n - b - 1][i] - adL[i]);
                }
                mod.push_back(std::move(g1));
                mod.push_back(std::move(gm));
                seq.push_back(&mod[0]);
                for (std::size_t k = a + 1; k + 1 < n - b; ++k) seq.push_back(&F[k]);
                seq.push_back(&mod[1]);
            }
            A v = chen_march(path, seq, zero);
            double c = ((b % 2) ? -1.0 : 1.0) / (fact_a * fact_b);
            total += static_cast<Real>(c) * v;
        }
    }
    return total;
}

}  // namespace detail

/// Regularised iterated integral I^l_gamma(omega_1, ..., omega_n).  The
/// integrand at the latest time stands leftmost in every product.
template <class A, class Real>
A reg_iterated_integral(const SampledPath<Real>& path, const std::vector<RegForm<A, Real>>& forms,
                        const Regulator<A, Real>& reg) {
    return detail::reg_integral_on(path, forms, reg);
}

/// Same value with an error estimate from a companion rule of
/// `coarse_nodes` nodes per panel on the same panels.
template <class A, class Real>
IntegralValue<A> reg_iterated_integral_est(const SampledPath<Real>& path, const SampledPath<Real>& coarse,
                                           const std::vector<RegForm<A, Real>>& forms,
                                           const Regulator<A, Real>& reg) {
    A v = detail::reg_integral_on(path, forms, reg);
    A c = detail::reg_integral_on(coarse, forms, reg);
    return {v, algebra_norm(v - c)};
}

/// Renormalised holonomy  sum_{n=0}^{depth} I^l(omega, ..., omega).
template <class A, class Real>
A renormalized_holonomy(const SampledPath<Real>& path, const RegForm<A, Real>& omega,
                        const Regulator<A, Real>& reg, int depth) {
    A total = algebra_unit(reg.charge);
    for (int n = 1; n <= depth; ++n) {
        std::vector<RegForm<A, Real>> forms(static_cast<std::size_t>(n), omega);
        total += reg_iterated_integral(path, forms, reg);
    }
    return total;
}

/// A smooth function g on the path together with its z-derivative.
template <class Real = double>
struct SmoothFunction {
    std::function<std::complex<Real>(const PathPoint<Real>&)> value;
    std::function<std::complex<Real>(const PathPoint<Real>&)> deriv;
};

/// Self-test of the integration-by-parts variation formula for scalar forms:
/// the epsilon-derivative of I^l(omega_1 + eps dg_1, ..., omega_n + eps dg_n)
/// (central difference) against
///   - g_1(a) I(omega_2..omega_n) + g_n(b) I(omega_1..omega_{n-1})
///   + sum_i (g_i - g_{i+1})(a) I(omega_1..omega_{i-1}, psi_i, omega_{i+2}..omega_n),
/// where a, b are the start and end of the path.  Throws ContractError when
/// the hypotheses fail numerically.  Returns |LHS - RHS|.
template <class Real>
double ibp_variation_check(const SampledPath<Real>& path,
                           const std::vector<RegForm<std::complex<Real>, Real>>& forms,
                           const Regulator<std::complex<Real>, Real>& reg,
                           const std::vector<SmoothFunction<Real>>& g,
                           const std::vector<RegForm<std::complex<Real>, Real>>& psi, double eps = 1e-5,
                           double hyp_tol = 1e-8) {
    using Complex = std::complex<Real>;
    using Form = RegForm<Complex, Real>;
    const std::size_t n = forms.size();
    if (n == 0 || g.size() != n || psi.size() + 1 != n)
        throw ContractError("ibp_variation_check: need n forms, n functions and n-1 contraction forms");
    const auto& pts = path.points();
    const PathPoint<Real>& pa = pts.front();
    const PathPoint<Real>& pb = pts.back();
    // endpoint values are taken at the outermost nodes' limits
    auto at_start = [&](const SmoothFunction<Real>& f) {
        PathPoint<Real> p = pa;
        p.t = 0;
        p.s = 1;
        p.z = path.start();
        p.from_start = 0;
        p.from_end = path.start() - path.end();
        return f.value(p);
    };
    auto at_end = [&](const SmoothFunction<Real>& f) {
        PathPoint<Real> p = pb;
        p.t = 1;
        p.s = 0;
        p.z = path.end();
        p.from_start = path.end() - path.start();
        p.from_end = 0;
        return f.value(p);
    };
    // hypotheses
    for (std::size_t i = 0; i + 1 < n; ++i) {
        Complex da = at_start(g[i]) - at_start(g[i + 1]);
        Complex db = at_end(g[i]) - at_end(g[i + 1]);
        if (std::abs(da - db) > hyp_tol * (1 + std::abs(da)))
            throw ContractError("ibp_variation_check: (g_i - g_{i+1}) differs at the two ends");
        for (std::size_t k = 0; k < pts.size(); k += pts.size() / 17 + 1) {
            const auto& p = pts[k];
            Complex lhs = g[i].value(p) * forms[i + 1].eval(p) - g[i + 1].value(p) * forms[i].eval(p);
            Complex rhs = da * psi[i].eval(p);
            if (std::abs(lhs - rhs) > hyp_tol * (1 + std::abs(lhs)))
                throw ContractError("ibp_variation_check: contraction hypothesis fails");
        }
    }
    auto perturbed = [&](double e) {
        std::vector<Form> f;
        for (std::size_t i = 0; i < n; ++i) {
            auto base = forms[i].eval;
            auto dg = g[i].deriv;
            f.push_back({[base, dg, e](const PathPoint<Real>& p) { return base(p) + Real(e) * dg(p); },
                         forms[i].charge});
        }
        return reg_iterated_integral(path, f, reg);
    };
    Complex lhs = (perturbed(eps) - perturbed(-eps)) / Real(2 * eps);
    auto sub = [&](std::size_t from, std::size_t to) {
        std::vector<Form> f(forms.begin() + from, forms.begin() + to);
        return reg_iterated_integral(path, f, reg);
    };
    Complex rhs = -at_start(g[0]) * sub(1, n) + at_end(g[n - 1]) * sub(0, n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        std::vector<Form> f(forms.begin(), forms.begin() + i);
        f.push_back(psi[i]);
        f.insert(f.end(), forms.begin() + i + 2, forms.end());
        rhs += (at_start(g[i]) - at_start(g[i + 1])) * reg_iterated_integral(path, f, reg);
    }
    return static_cast<double>(std::abs(lhs - rhs));
}

}  // namespace emzv
