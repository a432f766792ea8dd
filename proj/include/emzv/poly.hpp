#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace emzv {

using Rational = boost::multiprecision::cpp_rational;

/// Polynomial in x_1..x_n with exact rational coefficients.  Exponent vectors
/// are nonnegative; zero coefficients are never stored.
class Poly {
public:
    using Exp = std::vector<int>;

    Poly() = default;
    explicit Poly(int nvars) : n_(nvars) {}

    static Poly constant(int nvars, const Rational& c) {
        Poly p(nvars);
        p.add_term(Exp(nvars, 0), c);
        return p;
    }
    static Poly monomial(const Exp& e, const Rational& c = 1) {
        Poly p(static_cast<int>(e.size()));
        p.add_term(e, c);
        return p;
    }
    static Poly variable(int nvars, int i) {
        Exp e(nvars, 0);
        e[i] = 1;
        return monomial(e);
    }
    /// x_a + ... + x_b (0-based, inclusive).
    static Poly range_sum(int nvars, int a, int b) {
        Poly p(nvars);
        for (int i = a; i <= b; ++i) p += variable(nvars, i);
        return p;
    }

    int nvars() const { return n_; }
    const std::map<Exp, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    Rational coeff(const Exp& e) const {
        auto it = t_.find(e);
        return it == t_.end() ? Rational(0) : it->second;
    }

    void add_term(const Exp& e, const Rational& c) {
        if (static_cast<int>(e.size()) != n_) throw ContractError("Poly: exponent length mismatch");
        if (c == 0) return;
        auto [it, fresh] = t_.emplace(e, c);
        if (!fresh) {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        same(o);
        for (const auto& [e, c] : o.t_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        same(o);
        for (const auto& [e, c] : o.t_) add_term(e, -c);
        return *this;
    }
    Poly& operator*=(const Rational& c) {
        if (c == 0) t_.clear();
        for (auto& [e, v] : t_) v *= c;
        return *this;
    }
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Rational& c) { return a *= c; }
    friend Poly operator-(Poly a) { return a *= Rational(-1); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        a.same(b);
        Poly r(a.n_);
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_) {
                Exp e(ea);
                for (int i = 0; i < a.n_; ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.t_ == b.t_; }

    Poly pow(int k) const {
        Poly r = constant(n_, 1);
        for (int i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    /// Substitute x_i -> images[i] (all images share one variable count).
    Poly substitute(const std::vector<Poly>& images) const {
        if (static_cast<int>(images.size()) != n_) throw ContractError("Poly::substitute: wrong image count");
        int m = images.empty() ? 0 : images[0].nvars();
        Poly r(m);
        std::vector<std::vector<Poly>> powers(n_);
        for (const auto& [e, c] : t_) {
            Poly term = constant(m, c);
            for (int i = 0; i < n_; ++i) {
                if (e[i] == 0) continue;
                auto& pw = powers[i];
                if (pw.empty()) pw.push_back(constant(m, 1));
                while (static_cast<int>(pw.size()) <= e[i]) pw.push_back(pw.back() * images[i]);
                term = term * pw[e[i]];
            }
            r += term;
        }
        return r;
    }

    /// Exact division by x_a + ... + x_b; returns false (and leaves *this
    /// untouched) when the division is not exact.
    bool divide_range(int a, int b) {
        Poly rem = *this, q(n_);
        // the form is monic in x_b: peel x_b-degree from the top
        while (true) {
            int top = 0;
            for (const auto& [e, c] : rem.t_) top = std::max(top, e[b]);
            if (top == 0) break;
            std::vector<std::pair<Exp, Rational>> lead;
            for (const auto& [e, c] : rem.t_)
                if (e[b] == top) lead.emplace_back(e, c);
            for (auto& [e, c] : lead) {
                Exp qe = e;
                --qe[b];
                q.add_term(qe, c);
                for (int i = a; i <= b; ++i) {
                    Exp se = qe;
                    ++se[i];
                    rem.add_term(se, -c);
                }
            }
        }
        if (!rem.is_zero()) return false;
        *this = std::move(q);
        return true;
    }

    int total_degree_max() const {
        int d = -1;
        for (const auto& [e, c] : t_) {
            int s = 0;
            for (int x : e) s += x;
            d = std::max(d, s);
        }
        return d;
    }

    std::string str() const {
        if (t_.empty()) return "0";
        std::string s;
        for (const auto& [e, c] : t_) {
            if (!s.empty()) s += " + ";
            s += "(" + c.str() + ")";
            for (int i = 0; i < n_; ++i)
                if (e[i]) s += "*x" + std::to_string(i + 1) + (e[i] > 1 ? "^" + std::to_string(e[i]) : "");
        }
        return s;
    }

private:
    void same(const Poly& o) const {
        if (o.n_ != n_) throw ContractError("Poly: variable count mismatch");
    }
    int n_ = 0;
    std::map<Exp, Rational> t_;
};

/// Rational function num / prod (x_a + ... + x_b)^k over consecutive ranges.
/// Every denominator met in the functional Lie algebra is of this shape.
class Frac {
public:
    using Range = std::pair<int, int>;

    Frac() = default;
    explicit Frac(Poly num) : num_(std::move(num)) {}
    Frac(Poly num, std::map<Range, int> den) : num_(std::move(num)), den_(std::move(den)) { prune(); }

    int nvars() const { return num_.nvars(); }
    const Poly& num() const { return num_; }
    const std::map<Range, int>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    /// num * prod_{r in extra} L_r^{k_r}: rewrite over a larger denominator.
    Poly numerator_over(const std::map<Range, int>& target) const {
        Poly p = num_;
        for (const auto& [r, k] : target) {
            int have = 0;
            if (auto it = den_.find(r); it != den_.end()) have = it->second;
            if (have > k) throw ContractError("Frac: target denominator too small");
            if (k > have) p = p * Poly::range_sum(nvars(), r.first, r.second).pow(k - have);
        }
        for (const auto& [r, k] : den_)
            if (!target.count(r)) throw ContractError("Frac: target denominator misses a factor");
        return p;
    }

    friend Frac operator+(const Frac& a, const Frac& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        std::map<Range, int> d = a.den_;
        for (const auto& [r, k] : b.den_) d[r] = std::max(d[r], k);
        Frac s(a.numerator_over(d) + b.numerator_over(d), d);
        s.reduce();
        return s;
    }
    friend Frac operator-(const Frac& a) { return Frac(-a.num_, a.den_); }
    friend Frac operator-(const Frac& a, const Frac& b) { return a + (-b); }
    friend Frac operator*(const Frac& a, const Frac& b) {
        std::map<Range, int> d = a.den_;
        for (const auto& [r, k] : b.den_) d[r] += k;
        Frac p(a.num_ * b.num_, d);
        p.reduce();
        return p;
    }
    friend Frac operator*(Frac a, const Rational& c) {
        a.num_ *= c;
        a.prune();
        return a;
    }

    /// Substitute x_j -> x_{a_j} + ... + x_{b_j} for consecutive, increasing,
    /// disjoint ranges (relabelling and merging of variables).
    Frac substitute_ranges(const std::vector<Range>& img, int new_nvars) const {
        if (static_cast<int>(img.size()) != nvars()) throw ContractError("Frac: wrong range count");
        std::vector<Poly> images;
        for (const auto& r : img) images.push_back(Poly::range_sum(new_nvars, r.first, r.second));
        std::map<Range, int> d;
        for (const auto& [r, k] : den_) d[{img[r.first].first, img[r.second].second}] += k;
        Frac f(nvars() == 0 ? Poly::constant(new_nvars, num_.coeff({})) : num_.substitute(images), d);
        return f;
    }

    /// Cancel common linear factors so that the representation is canonical.
    void reduce() {
        if (num_.is_zero()) {
            den_.clear();
            return;
        }
        for (auto& [r, k] : den_)
            while (k > 0 && num_.divide_range(r.first, r.second)) --k;
        prune();
    }

    friend bool operator==(Frac a, Frac b) {
        a.reduce();
        b.reduce();
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    std::string str() const {
        std::string s = "(" + num_.str() + ")";
        for (const auto& [r, k] : den_) {
            s += " / (";
            for (int i = r.first; i <= r.second; ++i) s += (i > r.first ? "+x" : "x") + std::to_string(i + 1);
            s += ")";
            if (k > 1) s += "^" + std::to_string(k);
        }
        return s;
    }

private:
    void prune() {
        for (auto it = den_.begin(); it != den_.end();) it = (it->second == 0) ? den_.erase(it) : std::next(it);
        if (num_.is_zero()) den_.clear();
    }
    Poly num_;
    std::map<Range, int> den_;
};

}  // namespace emzv
