#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "ncseries.hpp"
#include "poly.hpp"

namespace emzv {

/// ad(x)^k (y) expanded into words.
template <class C>
NcSeries<C> ad_x_pow_y(int k, int trunc) {
    NcSeries<C> r(trunc);
    if (k + 1 > trunc) return r;
    Rational binom = 1;
    for (int j = 0; j <= k; ++j) {
        // coefficient of x^j y x^{k-j} is C(k, j) (-1)^{k-j}
        Rational c = ((k - j) % 2) ? -binom : binom;
        r.add(std::string(j, 'x') + "y" + std::string(k - j, 'x'), from_rational<C>(c));
        binom = binom * (k - j) / (j + 1);
    }
    return r;
}

/// Element of F = sum_n (x_1...x_n)^{-1} C[[x_1..x_n]], stored by exponent
/// vectors (e_1..e_n), e_i >= -1.  The monomial x_1^{e_1}..x_n^{e_n} is the
/// word b_{e_1}..b_{e_n} with b_e = [x^{e+1} y]; the product is concatenation.
template <class C>
class FElement {
public:
    using Exp = std::vector<int>;

    FElement() = default;
    static FElement monomial(const Exp& e, const C& c = C(1)) {
        FElement f;
        f.add(e, c);
        return f;
    }
    static FElement one() { return monomial({}); }

    const std::map<Exp, C>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    C coeff(const Exp& e) const {
        auto it = t_.find(e);
        return it == t_.end() ? C(0) : it->second;
    }
    int max_depth() const {
        int d = -1;
        for (const auto& [e, c] : t_) d = std::max(d, static_cast<int>(e.size()));
        return d;
    }
    /// Total (x, y)-degree of the word attached to e.
    static int degree(const Exp& e) {
        int s = 0;
        for (int x : e) s += x + 2;
        return s;
    }

    void add(const Exp& e, const C& c) {
        for (int x : e)
            if (x < -1) throw InvarianceError("FElement: pole of order > 1");
        if (c == C(0)) return;
        auto [it, fresh] = t_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == C(0)) t_.erase(it);
        }
    }
    FElement depth_part(int n) const {
        FElement r;
        for (const auto& [e, c] : t_)
            if (static_cast<int>(e.size()) == n) r.add(e, c);
        return r;
    }

    FElement& operator+=(const FElement& o) {
        for (const auto& [e, c] : o.t_) add(e, c);
        return *this;
    }
    FElement& operator-=(const FElement& o) {
        for (const auto& [e, c] : o.t_) add(e, -c);
        return *this;
    }
    friend FElement operator+(FElement a, const FElement& b) { return a += b; }
    friend FElement operator-(FElement a, const FElement& b) { return a -= b; }
    friend FElement operator*(FElement a, const C& c) {
        if (c == C(0)) return FElement();
        for (auto& [e, v] : a.t_) v *= c;
        return a;
    }
    friend bool operator==(const FElement& a, const FElement& b) { return a.t_ == b.t_; }

    std::string str() const {
        if (t_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : t_) {
            if (!s.empty()) s += " + ";
            std::ostringstream os;
            os << c;
            s += os.str() + "*[";
            for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
            s += "]";
        }
        return s;
    }

private:
    std::map<Exp, C> t_;
};

/// h(x_1..x_{n+m}) = f(x_1..x_n) g(x_{n+1}..x_{n+m}).
template <class C>
FElement<C> f_mul(const FElement<C>& f, const FElement<C>& g, int depth_cap = 1 << 20) {
    FElement<C> r;
    for (const auto& [a, ca] : f.terms())
        for (const auto& [b, cb] : g.terms()) {
            if (static_cast<int>(a.size() + b.size()) > depth_cap) throw TruncationError("f_mul: depth cap exceeded");
            std::vector<int> e(a);
            e.insert(e.end(), b.begin(), b.end());
            r.add(e, ca * cb);
        }
    return r;
}

/// Euler operator sum x_i d/dx_i.
template <class C>
FElement<C> xi(const FElement<C>& f) {
    FElement<C> r;
    for (const auto& [e, c] : f.terms()) {
        int s = 0;
        for (int x : e) s += x;
        r.add(e, c * C(s));
    }
    return r;
}

/// Word b_{e_1}..b_{e_n} in x, y.
template <class C>
NcSeries<C> b_word(const std::vector<int>& e, int trunc) {
    NcSeries<C> r = NcSeries<C>::one(trunc);
    for (int d : e) {
        if (d < -1) throw ContractError("b_word: index must be >= -1");
        r = r * ad_x_pow_y<C>(d + 1, trunc);
    }
    return r;
}

/// F -> U(f2 - Cx) in the x, y alphabet, truncated.
template <class C>
NcSeries<C> to_nc(const FElement<C>& f, int trunc) {
    NcSeries<C> r(trunc);
    for (const auto& [e, c] : f.terms())
        if (FElement<C>::degree(e) <= trunc) r += b_word<C>(e, trunc) * c;
    return r;
}

/// Lazard rewrite: U(f2 - Cx) -> F.  The word x^{k_1} y .. x^{k_n} y occurs
/// with coefficient 1 in [x^{k_1}y]..[x^{k_n}y] and only in products whose
/// index vector is lexicographically larger, so peeling from the largest
/// y-terminated word downwards is triangular.  Throws if the series is not in
/// the subalgebra (beyond `tol` for floating coefficients).
template <class C>
FElement<C> from_nc(const NcSeries<C>& s, double tol = 0) {
    FElement<C> out;
    NcSeries<C> rest = s;
    auto key = [](const std::string& w) {
        std::vector<int> k;
        int run = 0;
        for (char ch : w) {
            if (ch == 'x')
                ++run;
            else {
                k.push_back(run);
                run = 0;
            }
        }
        return k;
    };
    if (rest.constant() != C(0)) {
        out.add({}, rest.constant());
        rest.add("", -rest.constant());
    }
    while (true) {
        const std::string* best = nullptr;
        std::vector<int> bk;
        for (const auto& [w, c] : rest.terms()) {
            if (w.empty() || w.back() != 'y') continue;
            auto k = key(w);
            if (!best || k.size() > bk.size() || (k.size() == bk.size() && k > bk)) {
                best = &w;
                bk = std::move(k);
            }
        }
        if (!best) break;
        C c = rest.coeff(*best);
        std::vector<int> e(bk);
        for (int& x : e) --x;
        out.add(e, c);
        rest -= b_word<C>(e, s.trunc()) * c;
    }
    if (rest.max_abs() > tol) throw ContractError("from_nc: series is not in the subalgebra generated by [x^n y]");
    return out;
}

// ---------------------------------------------------------------------------
// Exact layer: rational-function realisation.

namespace detail {

inline std::map<Frac::Range, int> monomial_den(int n) {
    std::map<Frac::Range, int> d;
    for (int i = 0; i < n; ++i) d[{i, i}] = 1;
    return d;
}

/// Ranges for phi(x_{from} .. x_{from+n-1}) inside `total` variables (0-based).
inline std::vector<Frac::Range> shifted(int n, int from) {
    std::vector<Frac::Range> r;
    for (int j = 0; j < n; ++j) r.push_back({from + j, from + j});
    return r;
}

/// Ranges for f(x_1..x_{i-1}, x_i + .. + x_{i+len}, x_{i+len+1}..) where f has
/// m variables and the merged slot is the 0-based position i.
inline std::vector<Frac::Range> merged(int m, int i, int len) {
    std::vector<Frac::Range> r;
    for (int k = 0; k < m; ++k) {
        if (k < i)
            r.push_back({k, k});
        else if (k == i)
            r.push_back({i, i + len});
        else
            r.push_back({k + len, k + len});
    }
    return r;
}

}  // namespace detail

/// Depth-n part of an exact F element as a rational function.
inline Frac to_frac(const FElement<Rational>& f, int n) {
    Poly num(n);
    for (const auto& [e, c] : f.terms()) {
        if (static_cast<int>(e.size()) != n) continue;
        std::vector<int> a(e);
        for (int& x : a) ++x;
        num.add_term(a, c);
    }
    Frac r(num, detail::monomial_den(n));
    r.reduce();
    return r;
}

/// Rational function in n variables -> F_n.  Fails unless the only poles are
/// simple poles along the coordinate hyperplanes.
inline FElement<Rational> from_frac(Frac g) {
    g.reduce();
    const int n = g.nvars();
    for (const auto& [r, k] : g.den())
        if (r.first != r.second || k > 1) throw InvarianceError("from_frac: result keeps a pole outside F");
    FElement<Rational> f;
    for (const auto& [a, c] : g.num().terms()) {
        std::vector<int> e(a);
        for (int i = 0; i < n; ++i)
            if (g.den().count({i, i})) --e[i];
        f.add(e, c);
    }
    return f;
}

/// Element of the functional Lie algebra G0[n]: N(x_1..x_n) / (x_1..x_n (x_1+..+x_n)).
class GZeroElement {
public:
    GZeroElement() = default;
    GZeroElement(int depth, Frac f) : n_(depth), f_(std::move(f)) {
        if (depth < 1) throw ContractError("GZeroElement: depth must be >= 1");
        if (f_.nvars() != depth && !f_.is_zero()) throw ContractError("GZeroElement: variable count mismatch");
        f_.reduce();
        numerator();  // validates the denominator
    }
    static GZeroElement from_numerator(const Poly& num) {
        const int n = num.nvars();
        return GZeroElement(n, Frac(num, full_den(n)));
    }
    /// x_1^k in G0[1], k >= -2 even.
    static GZeroElement x1_power(int k) {
        if (k < -2) throw ContractError("x1_power: exponent must be >= -2");
        return from_numerator(Poly::monomial({k + 2}));
    }

    int depth() const { return n_; }
    const Frac& frac() const { return f_; }
    bool is_zero() const { return f_.is_zero(); }
    Poly numerator() const {
        if (f_.is_zero()) return Poly(n_);
        return f_.numerator_over(full_den(n_));
    }

    /// Invariance under the cyclic group C_{n+1} acting through
    /// C[x_1..x_n] = C[x_1..x_{n+1}]/(x_1+..+x_{n+1}).
    bool cyclic_invariant() const {
        Poly num = numerator();
        std::vector<Poly> img;
        for (int i = 1; i < n_; ++i) img.push_back(Poly::variable(n_, i));
        img.push_back(-Poly::range_sum(n_, 0, n_ - 1));
        return num.substitute(img) == num;
    }

    friend GZeroElement operator+(const GZeroElement& a, const GZeroElement& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.n_ != b.n_) throw ContractError("GZeroElement: depth mismatch");
        return GZeroElement(a.n_, a.f_ + b.f_);
    }
    friend GZeroElement operator-(const GZeroElement& a, const GZeroElement& b) {
        return a + GZeroElement(b.n_, -b.f_);
    }
    friend GZeroElement operator*(const GZeroElement& a, const Rational& c) { return GZeroElement(a.n_, a.f_ * c); }
    friend bool operator==(const GZeroElement& a, const GZeroElement& b) {
        if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
        return a.n_ == b.n_ && a.f_ == b.f_;
    }

    std::string str() const { return "G0[" + std::to_string(n_) + "] " + f_.str(); }

private:
    static std::map<Frac::Range, int> full_den(int n) {
        auto d = detail::monomial_den(n);
        d[{0, n - 1}] += 1;
        return d;
    }
    int n_ = 1;
    Frac f_;
};

/// The bracket of G0:
///   sum_{i=1}^{m} (phi^{i..i+n-1} - phi^{i+1..i+n}) psi^{1..i-1, i..i+n, i+n+1..n+m}
/// - sum_{j=1}^{n} (psi^{j..j+m-1} - psi^{j+1..j+m}) phi^{1..j-1, j..j+m, j+m+1..n+m}
/// - phi^{1..n} psi^{n+1..n+m} + phi^{m+1..m+n} psi^{1..m}.
inline GZeroElement g0_bracket(const GZeroElement& phi, const GZeroElement& psi, int depth_cap = 1 << 20) {
    const int n = phi.depth(), m = psi.depth(), N = n + m;
    if (N > depth_cap) throw TruncationError("g0_bracket: depth cap exceeded");
    if (phi.is_zero() || psi.is_zero()) return GZeroElement(N, Frac(Poly(N)));
    const Frac& p = phi.frac();
    const Frac& q = psi.frac();
    auto at = [N](const Frac& f, const std::vector<Frac::Range>& r) { return f.substitute_ranges(r, N); };
    Frac s{Poly(N)};
    for (int i = 0; i < m; ++i)
        s = s + (at(p, detail::shifted(n, i)) - at(p, detail::shifted(n, i + 1))) * at(q, detail::merged(m, i, n));
    for (int j = 0; j < n; ++j)
        s = s - (at(q, detail::shifted(m, j)) - at(q, detail::shifted(m, j + 1))) * at(p, detail::merged(n, j, m));
    s = s - at(p, detail::shifted(n, 0)) * at(q, detail::shifted(m, n)) + at(p, detail::shifted(n, m)) * at(q, detail::shifted(m, 0));
    return GZeroElement(N, s);
}

/// Module action of G0 on F:
///   sum_{i=1}^{m} (phi^{i..i+n-1} - phi^{i+1..i+n}) f^{1..i-1, i..i+n, i+n+1..n+m}
/// - phi^{1..n} f^{n+1..n+m} + phi^{m+1..m+n} f^{1..m}.
inline FElement<Rational> g0_act(const GZeroElement& phi, const FElement<Rational>& f, int depth_cap = 1 << 20) {
    FElement<Rational> out;
    if (phi.is_zero()) return out;
    const int n = phi.depth();
    const Frac& p = phi.frac();
    std::vector<int> depths;
    for (const auto& [e, c] : f.terms())
        if (depths.empty() || depths.back() != static_cast<int>(e.size())) depths.push_back(static_cast<int>(e.size()));
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
    for (int m : depths) {
        const int N = n + m;
        if (N > depth_cap) throw TruncationError("g0_act: depth cap exceeded");
        Frac g = to_frac(f, m);
        auto at = [N](const Frac& h, const std::vector<Frac::Range>& r) { return h.substitute_ranges(r, N); };
        Frac s{Poly(N)};
        for (int i = 0; i < m; ++i)
            s = s + (at(p, detail::shifted(n, i)) - at(p, detail::shifted(n, i + 1))) * at(g, detail::merged(m, i, n));
        s = s - at(p, detail::shifted(n, 0)) * at(g, detail::shifted(m, n)) + at(p, detail::shifted(n, m)) * at(g, detail::shifted(m, 0));
        out += from_frac(s);
    }
    return out;
}

/// A t-preserving derivation with its (x, y)-bidegree shift.
struct TDerivation {
    Derivation<Rational> d;
    int dx = 0;  // change of x-degree
    int dy = 0;  // change of y-degree
    int trunc() const { return d.trunc(); }
    NcSeries<Rational> operator()(const NcSeries<Rational>& s) const { return d(s); }
};

/// t = -[x, y].
template <class C>
NcSeries<C> t_element(int trunc) {
    NcSeries<C> X = NcSeries<C>::x(trunc), Y = NcSeries<C>::y(trunc);
    return Y * X - X * Y;
}

/// u = (x_1+..+x_n) phi and the v of the isomorphism G0 -> Der_t(f2, F); the
/// 1/(x_1+..+x_{n+1}) parts are combined before the pole is cancelled.
inline std::pair<FElement<Rational>, FElement<Rational>> g0_images(const GZeroElement& phi) {
    const int n = phi.depth();
    const Frac& p = phi.frac();
    Frac S_n(Poly::range_sum(n, 0, n - 1));
    FElement<Rational> u = from_frac(S_n * p);
    const int M = n + 1;
    Frac inv_first(Poly::constant(M, 1), {{{0, 0}, 1}});
    Frac inv_last(Poly::constant(M, 1), {{{M - 1, M - 1}, 1}});
    Frac inv_all(Poly::constant(M, 1), {{{0, M - 1}, 1}});
    Frac v = (inv_first - inv_all) * p.substitute_ranges(detail::shifted(n, 1), M) +
             (inv_all - inv_last) * p.substitute_ranges(detail::shifted(n, 0), M);
    return {u, from_frac(v)};
}

inline TDerivation der_from_g0(const GZeroElement& phi, int trunc) {
    auto [u, v] = g0_images(phi);
    int deg = phi.numerator().is_zero() ? 0 : phi.numerator().total_degree_max() - (phi.depth() + 1);
    // bidegree: x -> word of x-degree deg + 1 + n and y-degree n
    return TDerivation{{to_nc(u, trunc), to_nc(v, trunc)}, deg + phi.depth(), phi.depth()};
}

/// Inverse of der_from_g0 on graded derivations of one depth.
inline GZeroElement g0_from_der(const TDerivation& D) {
    const int N = D.trunc();
    if (!D(t_element<Rational>(N)).is_zero()) throw ContractError("g0_from_der: derivation does not annihilate t");
    FElement<Rational> u = from_nc(D.d.u);
    int n = u.max_depth();
    if (n < 1) {
        if (!D.d.v.is_zero()) throw ContractError("g0_from_der: u = 0 but v != 0");
        return GZeroElement(D.dy > 0 ? D.dy : 1, Frac(Poly(D.dy > 0 ? D.dy : 1)));
    }
    if (!(u.depth_part(n) == u)) throw ContractError("g0_from_der: image of x mixes depths");
    Frac f = to_frac(u, n);
    Frac phi = f * Frac(Poly::constant(n, 1), {{{0, n - 1}, 1}});
    GZeroElement g;
    try {
        g = GZeroElement(n, phi);
    } catch (const ContractError&) {
        throw InvarianceError("g0_from_der: image of x is not in the realised algebra");
    }
    if (!g.cyclic_invariant()) throw InvarianceError("g0_from_der: cyclic invariance fails");
    if (!(der_from_g0(g, N).d.v == D.d.v)) throw ContractError("g0_from_der: image of y does not match");
    return g;
}

/// delta_{2n} for n >= -1, through its realisation x_1^{2n} in G0[1].
/// delta_{2n}(x) = ad(x)^{2n+2}(y); delta_{-2} = (y, 0).
inline TDerivation delta(int n2, int trunc) {
    if (n2 < -2 || n2 % 2) throw ContractError("delta: index must be even and >= -2");
    return der_from_g0(GZeroElement::x1_power(n2), trunc);
}

/// e+ = (0, x).
inline TDerivation e_plus(int trunc) {
    return TDerivation{{NcSeries<Rational>(trunc), NcSeries<Rational>::x(trunc)}, 1, -1};
}
/// h = (x, -y).
inline TDerivation h_derivation(int trunc) {
    return TDerivation{{NcSeries<Rational>::x(trunc), -NcSeries<Rational>::y(trunc)}, 0, 0};
}

inline TDerivation tbracket(const TDerivation& a, const TDerivation& b) {
    return TDerivation{bracket(a.d, b.d), a.dx + b.dx, a.dy + b.dy};
}

struct SpecialDerivations {
    TDerivation e_plus, h;
};
inline SpecialDerivations special_derivations(int trunc) { return {e_plus(trunc), h_derivation(trunc)}; }

/// |to_nc(phi . f) - D_phi(to_nc(f))| in the x, y alphabet at truncation.
inline bool transport_holds(const GZeroElement& phi, const FElement<Rational>& f, int trunc) {
    TDerivation D = der_from_g0(phi, trunc);
    return to_nc(g0_act(phi, f), trunc) == D(to_nc(f, trunc));
}

// ---------------------------------------------------------------------------
// The Lie algebra G = sum_n C(x_1..x_{n+1}) and the morphism G0 -> G.

/// phi(x_1..x_n) - phi(x_2..x_{n+1}).
inline Frac g0_to_g(const GZeroElement& phi) {
    const int n = phi.depth();
    return phi.frac().substitute_ranges(detail::shifted(n, 0), n + 1) -
           phi.frac().substitute_ranges(detail::shifted(n, 1), n + 1);
}

/// [phi, psi] = sum_i phi^{i..i+n} psi^{1..i-1, i..i+n, i+n+1..} - (phi <-> psi),
/// phi in G[n] (n+1 variables), psi in G[m].
inline Frac g_bracket(const Frac& phi, int n, const Frac& psi, int m) {
    const int N = n + m + 1;
    auto half = [N](const Frac& a, int na, const Frac& b, int nb) {
        Frac s{Poly(N)};
        for (int i = 0; i <= nb; ++i)
            s = s + a.substitute_ranges(detail::shifted(na + 1, i), N) * b.substitute_ranges(detail::merged(nb + 1, i, na), N);
        return s;
    };
    return half(phi, n, psi, m) - half(psi, m, phi, n);
}

}  // namespace emzv
