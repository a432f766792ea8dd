#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"

namespace emzv {

inline double coeff_abs(const Rational& r) { return std::abs(static_cast<double>(r)); }
template <class T>
double coeff_abs(const std::complex<T>& z) {
    return static_cast<double>(std::abs(z));
}
inline double coeff_abs(double v) { return std::abs(v); }

/// Exact rational -> coefficient type.
template <class C>
C from_rational(const Rational& r) {
    if constexpr (std::is_same_v<C, Rational>)
        return r;
    else
        return C(static_cast<double>(r));
}

/// Truncated noncommutative power series in x, y.  Words are strings over
/// {'x', 'y'}, leftmost letter first; every stored word has length <= trunc.
template <class C>
class NcSeries {
public:
    using Word = std::string;

    NcSeries() = default;
    explicit NcSeries(int trunc) : n_(trunc) {
        if (trunc < 0) throw ContractError("NcSeries: negative truncation");
    }

    static NcSeries one(int trunc) { return scalar(trunc, C(1)); }
    static NcSeries scalar(int trunc, const C& c) {
        NcSeries s(trunc);
        s.add(Word(), c);
        return s;
    }
    static NcSeries letter(int trunc, char l) {
        NcSeries s(trunc);
        s.add(Word(1, l), C(1));
        return s;
    }
    static NcSeries x(int trunc) { return letter(trunc, 'x'); }
    static NcSeries y(int trunc) { return letter(trunc, 'y'); }
    static NcSeries word(int trunc, const Word& w, const C& c = C(1)) {
        NcSeries s(trunc);
        s.add(w, c);
        return s;
    }

    int trunc() const { return n_; }
    const std::map<Word, C>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    C coeff(const Word& w) const {
        auto it = t_.find(w);
        return it == t_.end() ? C(0) : it->second;
    }
    C constant() const { return coeff(Word()); }

    void add(const Word& w, const C& c) {
        if (static_cast<int>(w.size()) > n_ || c == C(0)) return;
        auto [it, fresh] = t_.emplace(w, c);
        if (!fresh) {
            it->second += c;
            if (it->second == C(0)) t_.erase(it);
        }
    }

    NcSeries& operator+=(const NcSeries& o) {
        for (const auto& [w, c] : o.t_) add(w, c);
        return *this;
    }
    NcSeries& operator-=(const NcSeries& o) {
        for (const auto& [w, c] : o.t_) add(w, -c);
        return *this;
    }
    NcSeries& operator*=(const C& c) {
        if (c == C(0)) t_.clear();
        for (auto& [w, v] : t_) v *= c;
        return *this;
    }
    friend NcSeries operator+(NcSeries a, const NcSeries& b) { return a += b; }
    friend NcSeries operator-(NcSeries a, const NcSeries& b) { return a -= b; }
    friend NcSeries operator-(NcSeries a) { return a *= C(-1); }
    friend NcSeries operator*(NcSeries a, const C& c) { return a *= c; }
    friend NcSeries operator*(const C& c, NcSeries a) { return a *= c; }
    friend NcSeries operator*(const NcSeries& a, const NcSeries& b) {
        NcSeries r(std::min(a.n_, b.n_));
        for (const auto& [wa, ca] : a.t_)
            for (const auto& [wb, cb] : b.t_)
                if (static_cast<int>(wa.size() + wb.size()) <= r.n_) r.add(wa + wb, ca * cb);
        return r;
    }
    friend bool operator==(const NcSeries& a, const NcSeries& b) { return a.t_ == b.t_; }

    /// Homogeneous component of the given degree.
    NcSeries degree_part(int d) const {
        NcSeries r(n_);
        for (const auto& [w, c] : t_)
            if (static_cast<int>(w.size()) == d) r.add(w, c);
        return r;
    }
    NcSeries truncated(int n) const {
        NcSeries r(std::min(n, n_));
        for (const auto& [w, c] : t_) r.add(w, c);
        return r;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& [w, c] : t_) m = std::max(m, coeff_abs(c));
        return m;
    }

    std::string str() const {
        if (t_.empty()) return "0";
        std::string s;
        for (const auto& [w, c] : t_) {
            if (!s.empty()) s += " + ";
            s += coeff_str(c) + "*" + (w.empty() ? "1" : w);
        }
        return s;
    }

private:
    static std::string coeff_str(const C& c) {
        if constexpr (std::is_same_v<C, Rational>)
            return c.str();
        else if constexpr (std::is_arithmetic_v<C>)
            return std::to_string(c);
        else
            return "(" + std::to_string(static_cast<double>(c.real())) + "," +
                   std::to_string(static_cast<double>(c.imag())) + ")";
    }
    int n_ = 0;
    std::map<Word, C> t_;
};

template <class C>
NcSeries<C> commutator(const NcSeries<C>& a, const NcSeries<C>& b) {
    return a * b - b * a;
}

/// exp(S) for S without constant term.
template <class C>
NcSeries<C> nc_exp(const NcSeries<C>& s) {
    if (s.constant() != C(0)) throw ContractError("nc_exp: series must have zero constant term");
    NcSeries<C> r = NcSeries<C>::one(s.trunc()), p = r;
    for (int k = 1; k <= s.trunc(); ++k) {
        p = p * s * (C(1) / C(k));
        if (p.is_zero()) break;
        r += p;
    }
    return r;
}

/// log(S) for S with constant term 1.
template <class C>
NcSeries<C> nc_log(const NcSeries<C>& s) {
    if (s.constant() != C(1)) throw ContractError("nc_log: series must have constant term 1");
    NcSeries<C> u = s - NcSeries<C>::one(s.trunc());
    NcSeries<C> r(s.trunc()), p = NcSeries<C>::one(s.trunc());
    for (int k = 1; k <= s.trunc(); ++k) {
        p = p * u;
        if (p.is_zero()) break;
        r += p * (C((k % 2) ? 1 : -1) / C(k));
    }
    return r;
}

/// S^{-1} for S with invertible constant term.
template <class C>
NcSeries<C> nc_inverse(const NcSeries<C>& s) {
    C c0 = s.constant();
    if (c0 == C(0)) throw ContractError("nc_inverse: constant term must be invertible");
    NcSeries<C> u = s * (C(1) / c0) - NcSeries<C>::one(s.trunc());
    NcSeries<C> r = NcSeries<C>::one(s.trunc()), p = r;
    for (int k = 1; k <= s.trunc(); ++k) {
        p = p * u * C(-1);
        if (p.is_zero()) break;
        r += p;
    }
    return r * (C(1) / c0);
}

/// Algebra morphism x -> X, y -> Y applied to S.  X and Y should have no
/// constant term so that truncation is respected.
template <class C>
NcSeries<C> substitute(const NcSeries<C>& s, const NcSeries<C>& X, const NcSeries<C>& Y) {
    std::map<std::string, NcSeries<C>> memo;
    const int N = s.trunc();
    std::function<const NcSeries<C>&(const std::string&)> img = [&](const std::string& w) -> const NcSeries<C>& {
        auto it = memo.find(w);
        if (it != memo.end()) return it->second;
        NcSeries<C> r = w.empty() ? NcSeries<C>::one(N)
                                  : img(w.substr(0, w.size() - 1)) * (w.back() == 'x' ? X : Y);
        return memo.emplace(w, std::move(r)).first->second;
    };
    NcSeries<C> r(N);
    for (const auto& [w, c] : s.terms()) r += img(w) * c;
    return r;
}

/// Derivation of the free algebra given by its values on x and y.
template <class C>
struct Derivation {
    NcSeries<C> u;  // image of x
    NcSeries<C> v;  // image of y

    int trunc() const { return std::min(u.trunc(), v.trunc()); }

    NcSeries<C> operator()(const NcSeries<C>& s) const {
        const int N = s.trunc();
        NcSeries<C> r(N);
        for (const auto& [w, c] : s.terms()) {
            for (std::size_t i = 0; i < w.size(); ++i) {
                const NcSeries<C>& d = (w[i] == 'x') ? u : v;
                for (const auto& [dw, dc] : d.terms()) {
                    if (static_cast<int>(w.size() - 1 + dw.size()) > N) continue;
                    r.add(w.substr(0, i) + dw + w.substr(i + 1), c * dc);
                }
            }
        }
        return r;
    }

    friend Derivation operator+(const Derivation& a, const Derivation& b) { return {a.u + b.u, a.v + b.v}; }
    friend Derivation operator-(const Derivation& a, const Derivation& b) { return {a.u - b.u, a.v - b.v}; }
    friend Derivation operator*(const C& c, const Derivation& a) { return {a.u * c, a.v * c}; }
    friend bool operator==(const Derivation& a, const Derivation& b) { return a.u == b.u && a.v == b.v; }
};

/// [D1, D2] = D1 D2 - D2 D1.
template <class C>
Derivation<C> bracket(const Derivation<C>& a, const Derivation<C>& b) {
    NcSeries<C> X = NcSeries<C>::x(a.trunc()), Y = NcSeries<C>::y(a.trunc());
    return {a(b(X)) - b(a(X)), a(b(Y)) - b(a(Y))};
}

/// exp(D)(S) = sum D^k(S)/k!, for D raising degree.
template <class C>
NcSeries<C> apply_exp(const Derivation<C>& d, const NcSeries<C>& s, const C& scale = C(1), int max_terms = 64) {
    NcSeries<C> r = s, p = s;
    for (int k = 1; k <= max_terms; ++k) {
        p = d(p) * (scale / C(k));
        if (p.is_zero()) return r;
        r += p;
    }
    throw TruncationError("apply_exp: derivation is not nilpotent at this truncation");
}

/// All shuffles of two words.
inline std::vector<std::string> shuffle_words(const std::string& a, const std::string& b) {
    std::vector<std::string> out;
    std::string cur;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t j) {
        if (i == a.size() && j == b.size()) {
            out.push_back(cur);
            return;
        }
        if (i < a.size()) {
            cur.push_back(a[i]);
            rec(i + 1, j);
            cur.pop_back();
        }
        if (j < b.size()) {
            cur.push_back(b[j]);
            rec(i, j + 1);
            cur.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

/// Largest deviation from S_u S_v = sum_{w in u sh v} S_w over all words with
/// |u| + |v| <= trunc, plus |S_1 - 1|.  Zero iff S is group-like for the
/// coproduct making x, y primitive.
template <class C>
double grouplike_defect(const NcSeries<C>& s) {
    const int N = s.trunc();
    std::vector<std::vector<std::string>> words(N + 1);
    words[0].push_back("");
    for (int d = 1; d <= N; ++d)
        for (const auto& w : words[d - 1]) {
            words[d].push_back(w + "x");
            words[d].push_back(w + "y");
        }
    double worst = coeff_abs(s.constant() - C(1));
    for (int p = 1; p <= N; ++p)
        for (int q = p; p + q <= N; ++q)
            for (const auto& u : words[p])
                for (const auto& v : words[q]) {
                    C acc = s.coeff(u) * s.coeff(v);
                    for (const auto& w : shuffle_words(u, v)) acc -= s.coeff(w);
                    worst = std::max(worst, coeff_abs(acc));
                }
    return worst;
}

}  // namespace emzv
