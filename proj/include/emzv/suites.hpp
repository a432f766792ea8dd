#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kzb.hpp"

namespace emzv {

/// Pass thresholds for every identity suite.
struct Tolerances {
    double shuffle = 1e-8;
    double reversal = 1e-8;
    double modular = 1e-7;
    double ode = 1e-5;
    double kzb_relations = 1e-6;
    double kzb_ode = 1e-5;
    double kzb_layers = 1e-8;
    double decay_ratio = 0.2;  // relative deviation from e^{-2 pi}
    double flat_words = 1e-8;
    double depth_one = 1e-8;
    double special = 1e-9;
    double special_fd = 1e-6;
    double grouplike = 1e-9;
    double degree_one = 1e-10;
    double zeta_two = 1e-8;
};

inline std::string tau_str(Cx tau) {
    std::ostringstream os;
    os.precision(6);
    os << tau.real() << (tau.imag() < 0 ? "-" : "+") << std::abs(tau.imag()) << "i";
    return os.str();
}

namespace detail {

inline CheckResult exact(std::string name, std::string identity, bool ok, std::string detail = {}) {
    return {std::move(name), std::move(identity), ok ? 0.0 : 1.0, 0.5, std::move(detail)};
}

}  // namespace detail

/// u * v = sum of shuffles, for every pair of weight sum <= max_weight.
inline std::vector<CheckResult> shuffle_suite(const Engine<double>& e, int max_weight, double tol) {
    std::vector<CheckResult> out;
    for (Kind k : {Kind::I, Kind::J}) {
        CheckResult r{std::string("shuffle ") + kind_name(k), "shuffle product", 0, tol, ""};
        int pairs = 0;
        for (int w1 = 1; w1 < max_weight; ++w1)
            for (int w2 = 1; w1 + w2 <= max_weight; ++w2)
                for (const auto& u : words_of_weight(w1))
                    for (const auto& v : words_of_weight(w2)) {
                        double res = check_shuffle(e, u, v, k);
                        ++pairs;
                        if (res >= r.residual) {
                            r.residual = res;
                            r.detail = "(" + u.str() + ") x (" + v.str() + ")";
                        }
                    }
        r.detail = std::to_string(pairs) + " pairs at tau=" + tau_str(e.lattice().tau()) + ", worst " + r.detail;
        out.push_back(r);
    }
    return out;
}

/// Reversal identity for every word of weight <= max_weight.
inline std::vector<CheckResult> reversal_suite(const Engine<double>& e, int max_weight, double tol) {
    std::vector<CheckResult> out;
    for (Kind k : {Kind::I, Kind::J}) {
        CheckResult r{std::string("reversal ") + kind_name(k), "reversal", 0, tol, ""};
        auto words = words_up_to_weight(max_weight);
        for (const auto& w : words) {
            double res = check_reversal(e, w, k);
            if (res >= r.residual) {
                r.residual = res;
                r.detail = w.str();
            }
        }
        r.detail = std::to_string(words.size()) + " words at tau=" + tau_str(e.lattice().tau()) + ", worst (" +
                   r.detail + ")";
        out.push_back(r);
    }
    return out;
}

/// J at tau against I at -1/tau for depths <= n and entries <= d_max.
inline std::vector<CheckResult> modular_suite(const Engine<double>& at_tau, const Engine<double>& at_inv, int n,
                                              int d_max, double tol) {
    double res = check_modular(at_tau, at_inv, n, d_max);
    return {{"modular", "modular transform", res, tol,
             "depth <= " + std::to_string(n) + ", D_max=" + std::to_string(d_max) + ", tau=" +
                 tau_str(at_tau.lattice().tau())}};
}

/// tau-differential system for every word of weight <= max_weight.
inline std::vector<CheckResult> ode_suite(const OdeContext<double>& ctx, int max_weight, double tol) {
    std::vector<CheckResult> out;
    for (Kind k : {Kind::I, Kind::J}) {
        CheckResult r{std::string("ode ") + kind_name(k), "tau differential system", 0, tol, ""};
        for (const auto& w : words_up_to_weight(max_weight)) {
            double res = check_ode(ctx, w, k);
            if (res >= r.residual) {
                r.residual = res;
                r.detail = w.str();
            }
        }
        r.detail = "weight <= " + std::to_string(max_weight) + " at tau=" + tau_str(ctx.center().lattice().tau()) +
                   ", worst (" + r.detail + ")";
        out.push_back(r);
    }
    return out;
}

/// Relations of A, B in the truncated group, their differential equations,
/// the layerwise comparison with the scalar system and, if an engine at
/// -1/tau is given, the modular identities.
inline std::vector<CheckResult> kzb_suite(const OdeContext<double>& ctx, int N, const Tolerances& tol,
                                          const Engine<double>* inv = nullptr) {
    const Engine<double>& e = ctx.center();
    std::vector<CheckResult> out;
    auto g = check_group_relations(assemble_A(e, N), assemble_B(e, N));
    const std::string at = "N=" + std::to_string(N) + ", tau=" + tau_str(e.lattice().tau());
    out.push_back({"kzb A relation", "A A^{2,1} relation", g.a_relation, tol.kzb_relations, at});
    out.push_back({"kzb B relation", "B B^{2,1} relation", g.b_relation, tol.kzb_relations, at});
    out.push_back({"kzb commutator", "commutator of A and B", g.commutator, tol.kzb_relations, at});
    out.push_back({"kzb minus identity A", "action of -1 on A", g.minus_identity_a, tol.kzb_relations, at});
    out.push_back({"kzb minus identity B", "action of -1 on B", g.minus_identity_b, tol.kzb_relations, at});
    auto d = check_kzb_ode(ctx, N);
    out.push_back({"kzb ode A", "differential equation of A", d.a_equation, tol.kzb_ode, at});
    out.push_back({"kzb ode B", "differential equation of B", d.b_equation, tol.kzb_ode, at});
    auto l = compare_ode_layers(ctx, N);
    out.push_back({"kzb layers", "series equation vs scalar system", l.max_difference, tol.kzb_layers,
                   std::to_string(l.words) + " words, " + at});
    if (inv) {
        auto m = check_modular_AB(e, *inv, N);
        out.push_back({"kzb modular A", "modular identity of A", m.a_identity, tol.kzb_relations, at});
        out.push_back({"kzb modular B", "modular identity of B", m.b_identity, tol.kzb_relations, at});
    }
    return out;
}

/// Expansion at i infinity: decay of I_d(iT) - I_{d,0} between T1 and T2,
/// and vanishing corrections in depth one.
inline std::vector<CheckResult> asymptotic_suite(const Tolerances& tol, int N = 4, double T1 = 3, double T2 = 4,
                                                 const Settings& s = {}) {
    AsymptoticEngine a(N, 3);
    Engine<double> e1(LatticeParam<double>(Cx(0, T1), s)), e2(LatticeParam<double>(Cx(0, T2), s));
    const double target = std::exp(-2 * std::numbers::pi * (T2 - T1));
    CheckResult decay{"asymptotic decay", "first correction at i infinity", 0, tol.decay_ratio, ""};
    CheckResult flat{"asymptotic flat words", "first correction at i infinity", 0, tol.flat_words, ""};
    int checked = 0, flat_count = 0;
    std::string worst_d, worst_f;
    for (const auto& w : words_up_to_weight(N)) {
        auto c = a.coefficients(w);
        Cx d1 = e1.value(Kind::I, w) - c[0];
        Cx d2 = e2.value(Kind::I, w) - c[0];
        if (std::abs(c[1]) > 1e-6) {
            double dev = std::abs(std::abs(d2) / std::abs(d1) / target - 1.0);
            if (dev >= decay.residual) worst_d = w.str();
            decay.residual = std::max(decay.residual, dev);
            ++checked;
        } else {
            if (std::abs(d1) >= flat.residual) worst_f = w.str();
            flat.residual = std::max(flat.residual, std::abs(d1));
            ++flat_count;
        }
    }
    if (checked == 0) decay.residual = std::numeric_limits<double>::infinity();
    decay.detail = std::to_string(checked) + " words with a q^1 term, worst (" + worst_d + ")";
    flat.detail = std::to_string(flat_count) + " words without a q^1 term, worst (" + worst_f + ")";
    CheckResult depth1{"asymptotic depth one", "depth-one expansion is constant", 0, tol.depth_one, ""};
    for (int d = -1; d + 2 <= N; ++d) {
        auto c = a.coefficients(IndexWord{d});
        for (std::size_t m = 1; m < c.size(); ++m) depth1.residual = std::max(depth1.residual, std::abs(c[m]));
    }
    depth1.detail = "I_{d,m}, m = 1..3, d <= " + std::to_string(N - 2);
    return {decay, flat, depth1};
}

/// Theta, Weierstrass and Eisenstein identities at one tau.
inline std::vector<CheckResult> special_function_suite(Cx tau, const Tolerances& tol) {
    using Lat = LatticeParam<double>;
    const double PI = std::numbers::pi;
    const Cx I1(0, 1);
    Lat lat(tau), inv = lat.inverted();
    const std::string at = "tau=" + tau_str(tau);
    std::vector<CheckResult> out;
    const std::vector<Cx> zs{Cx(0.3), Cx(0.2, 0.1), Cx(-0.15, 0.05), Cx(0.41, 0.3)};

    double odd = 0, per = 0;
    for (Cx z : zs) {
        odd = std::max(odd, std::abs(theta(lat, z) + theta(lat, -z)));
        per = std::max(per, std::abs(theta(lat, z + 1.0) + theta(lat, z)));
    }
    out.push_back({"theta odd", "theta(-z) = -theta(z)", odd, tol.special, at});
    out.push_back({"theta period 1", "theta(z+1) = -theta(z)", per, tol.special, at});

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double qp = 0;
    for (int k = 0; k < 100; ++k) {
        Cx z = u(rng) + u(rng) * tau;
        Cx lhs = theta(lat, z + tau) + std::exp(-I1 * PI * tau) * std::exp(-2.0 * I1 * PI * z) * theta(lat, z);
        qp = std::max(qp, std::abs(lhs) / (1 + std::abs(theta(lat, z + tau))));
    }
    out.push_back({"theta period tau", "theta(z+tau) = -e^{-i pi tau - 2 pi i z} theta(z)", qp, tol.special, at});

    out.push_back({"theta normalisation", "theta'(0) = 1", std::abs(theta_taylor(lat, Cx(0), 1)[1] - 1.0),
                   tol.special, at});

    double mt = 0;
    for (Cx z : zs) {
        Cx rhs = (1.0 / tau) * std::exp(I1 * PI * tau * z * z) * theta(lat, tau * z);
        mt = std::max(mt, std::abs(theta(inv, z) - rhs));
    }
    out.push_back({"theta modular", "theta modular transform", mt, tol.special, at});

    double wpm = 0;
    for (Cx x : {Cx(0.21), Cx(0.1, 0.07)}) {
        Cx lhs = wp(inv, x);
        wpm = std::max(wpm, std::abs(lhs - tau * tau * wp(lat, tau * x)) / std::abs(lhs));
    }
    out.push_back({"wp modular", "wp(x; -1/tau) = tau^2 wp(tau x; tau)", wpm, tol.special, at});

    Cx g2 = eisenstein(inv, 2) - (tau * tau * eisenstein(lat, 2) - 2.0 * PI * I1 * tau);
    out.push_back({"G2 anomaly", "G_2(-1/tau) = tau^2 G_2(tau) - 2 pi i tau", std::abs(g2), tol.special, at});

    // (x+y)[(d_x s_x) s_y - s_x (d_y s_y)] = [(x+y) s_{x+y}] (wp(y) - wp(x)) as Laurent polynomials
    {
        const int N = 9;
        auto s = KernelFamily<double>(lat, N + 2).sigma(Cx(0.37));
        auto ds = s.derivative();
        using Bi = std::map<std::pair<int, int>, Cx>;
        Bi lhs, rhs, merged;
        for (int i = -2; i <= N; ++i)
            for (int j = -2; j <= N; ++j) {
                Cx c = ds[i] * s[j] - s[i] * ds[j];
                lhs[{i + 1, j}] += c;
                lhs[{i, j + 1}] += c;
            }
        merged[{0, 0}] += 1.0;
        for (int n = 0; n <= N; ++n) {
            double b = 1;
            for (int a = 0; a <= n + 1; ++a) {
                merged[{a, n + 1 - a}] += s[n] * b;
                b = b * double(n + 1 - a) / double(a + 1);
            }
        }
        std::vector<std::pair<int, Cx>> wps{{-2, 1.0}};
        for (int n = 1; 2 * n <= N + 2; ++n) wps.push_back({2 * n, double(2 * n + 1) * eisenstein(lat, 2 * n + 2)});
        for (auto& [k, c] : merged)
            for (auto& [ex, g] : wps) {
                rhs[{k.first, k.second + ex}] += c * g;
                rhs[{k.first + ex, k.second}] -= c * g;
            }
        double fay = 0;
        const int cap = N - 3;
        for (int i = -3; i <= cap; ++i)
            for (int j = -3; i + j <= cap; ++j) {
                Cx l = lhs.count({i, j}) ? lhs[{i, j}] : Cx(0);
                Cx r = rhs.count({i, j}) ? rhs[{i, j}] : Cx(0);
                fay = std::max(fay, std::abs(l - r));
            }
        out.push_back({"Fay identity", "Fay identity for the kernels", fay, tol.special, at});
    }

    // d_tau k_n(z) = (n+1)/(2 pi i) d_z k_{n+1}(z), central differences
    {
        const int N = 5;
        const double h = 1e-4;
        const Cx z(0.37, 0.11);
        auto sig = [&](Cx t, Cx zz) { return KernelFamily<double>(Lat(t), N + 1).sigma(zz); };
        auto tp = sig(tau + h, z), tm = sig(tau - h, z), zp = sig(tau, z + h), zm = sig(tau, z - h);
        double heat = 0;
        for (int n = 0; n < N; ++n) {
            Cx lhs = (tp[n] - tm[n]) / (2 * h);
            Cx rhs = double(n + 1) * (zp[n + 1] - zm[n + 1]) / (2 * h) / (2 * PI * I1);
            heat = std::max(heat, std::abs(lhs - rhs));
        }
        out.push_back({"heat equation", "heat equation for the kernels", heat, tol.special_fd, at + ", step 1e-4"});
    }
    return out;
}

/// Exact identities of the derivation algebra and its functional realisation.
inline std::vector<CheckResult> algebra_suite() {
    using Q = Rational;
    using F = FElement<Q>;
    std::vector<CheckResult> out;
    const std::vector<GZeroElement> gens{GZeroElement::x1_power(-2), GZeroElement::x1_power(0),
                                         GZeroElement::x1_power(2), GZeroElement::x1_power(4)};
    const std::vector<F> fs{F::monomial({-1}),
                            F::monomial({0}),
                            F::monomial({3}),
                            F::monomial({1, -1}),
                            F::monomial({-1, 2}) + F::monomial({0, 0}, Q(2, 3)),
                            F::monomial({-1, 0, -1})};

    bool ok = true;
    for (int n2 = -2; n2 <= 6; n2 += 2) ok = ok && delta(n2, 10)(t_element<Q>(10)).is_zero();
    out.push_back(detail::exact("delta annihilates t", "delta_{2n}(t) = 0", ok, "2n = -2..6, N = 10"));

    const int NB = 12;
    ok = true;
    for (const auto& a : gens)
        for (const auto& b : gens) {
            GZeroElement br = g0_bracket(a, b);
            TDerivation lhs = der_from_g0(br, NB);
            TDerivation rhs = tbracket(der_from_g0(a, NB), der_from_g0(b, NB));
            ok = ok && br.cyclic_invariant() && lhs.d == rhs.d;
        }
    ok = ok && !der_from_g0(g0_bracket(gens[2], gens[3]), NB).d.u.is_zero();
    out.push_back(detail::exact("G0 bracket", "bracket of G0 = commutator of derivations", ok,
                                "x1^{-2,0,2,4}, N = 12"));

    ok = true;
    for (const auto& f : fs)
        for (std::size_t a = 0; a < gens.size(); ++a)
            for (std::size_t b = a + 1; b < gens.size(); ++b) {
                F lhs = g0_act(g0_bracket(gens[a], gens[b]), f);
                F rhs = g0_act(gens[a], g0_act(gens[b], f)) - g0_act(gens[b], g0_act(gens[a], f));
                ok = ok && lhs == rhs;
            }
    out.push_back(detail::exact("G0 module axiom", "[phi,psi] . f = phi . psi . f - psi . phi . f", ok));

    auto sp = special_derivations(10);
    ok = true;
    for (int n2 = 0; n2 <= 4; n2 += 2) {
        TDerivation c = tbracket(sp.e_plus, delta(n2, 10));
        ok = ok && c.d.u.is_zero() && c.d.v.is_zero();
    }
    out.push_back(detail::exact("e+ commutes with delta", "[e+, delta_{2n}] = 0 for n >= 0", ok, "N = 10"));
    TDerivation ed = tbracket(sp.e_plus, delta(-2, 10));
    Derivation<Q> sum = Q(1, 2) * tbracket(sp.e_plus, ed).d + sp.e_plus.d;
    out.push_back(detail::exact("e+ and delta_-2", "1/2 [e+, [e+, delta_-2]] + e+ = 0",
                                sum.u.is_zero() && sum.v.is_zero() && ed.d == sp.h.d, "N = 10"));

    // transport: basis elements, a bracket, and an Eisenstein-type combination
    // sum c_n x1^{2n} with generic rational coefficients
    const int NT = 11;
    GZeroElement eis = GZeroElement::x1_power(-2);
    const Q cs[] = {Q(3, 7), Q(-5, 11), Q(13, 17)};
    for (int n = 1; n <= 3; ++n) eis = eis + GZeroElement::x1_power(2 * n) * cs[n - 1];
    std::vector<GZeroElement> phis = gens;
    phis.push_back(g0_bracket(gens[0], gens[2]));
    phis.push_back(eis);
    ok = true;
    for (const auto& phi : phis)
        for (const auto& f : fs) ok = ok && transport_holds(phi, f, NT);
    out.push_back(detail::exact("transport", "phi . f matches the derivation acting on generating series", ok,
                                "N = 11"));
    return out;
}

/// Group-likeness and low coefficients of the KZ associator.
inline std::vector<CheckResult> associator_suite(const Tolerances& tol, int N = 5) {
    CSeries phi = kz_associator(N);
    boost::math::quadrature::tanh_sinh<double> ts;
    double oracle = ts.integrate([](double t) { return -std::log1p(-t) / t; }, 0.0, 1.0);
    const std::string at = "weight <= " + std::to_string(N);
    return {
        {"associator group-like", "Phi is group-like", grouplike_defect(phi), tol.grouplike, at},
        {"associator degree one", "Phi has no linear terms",
         std::max(std::abs(phi.coeff("x")), std::abs(phi.coeff("y"))), tol.degree_one, at},
        {"associator zeta(2)", "|coefficient of ab| = zeta(2)", std::abs(std::abs(phi.coeff("xy")) - oracle),
         tol.zeta_two, "against int_0^1 -log(1-t)/t dt"},
    };
}

}  // namespace emzv
