#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace emzv {

/// Truncated one-variable Laurent series  sum_{k=min_deg}^{trunc} c_k x^k.
template <class C>
class LaurentSeries {
public:
    LaurentSeries() = default;
    LaurentSeries(int min_deg, int trunc)
        : min_deg_(min_deg), trunc_(trunc),
          coeffs_(static_cast<std::size_t>(std::max(0, trunc - min_deg + 1))) {}

    int min_deg() const { return min_deg_; }
    int trunc() const { return trunc_; }
    const std::vector<C>& coeffs() const { return coeffs_; }

    /// Coefficient of x^k (zero outside the stored range).
    C coeff(int k) const {
        if (k < min_deg_ || k > trunc_) return C(0);
        return coeffs_[static_cast<std::size_t>(k - min_deg_)];
    }
    C& at(int k) {
        if (k < min_deg_ || k > trunc_) throw ContractError("LaurentSeries: degree out of range");
        return coeffs_[static_cast<std::size_t>(k - min_deg_)];
    }
    C operator[](int k) const { return coeff(k); }

    LaurentSeries truncated(int new_trunc) const {
        LaurentSeries r(min_deg_, std::min(new_trunc, trunc_));
        for (int k = r.min_deg_; k <= r.trunc_; ++k) r.at(k) = coeff(k);
        return r;
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        LaurentSeries r(std::min(a.min_deg_, b.min_deg_), std::min(a.trunc_, b.trunc_));
        for (int k = r.min_deg_; k <= r.trunc_; ++k) r.at(k) = a.coeff(k) + b.coeff(k);
        return r;
    }
    friend LaurentSeries operator-(const LaurentSeries& a) {
        LaurentSeries r = a;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return a + (-b); }
    friend LaurentSeries operator*(const C& s, LaurentSeries a) {
        for (auto& c : a.coeffs_) c *= s;
        return a;
    }

    /// Product; the result is exact up to the degree both inputs determine.
    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        int lo = a.min_deg_ + b.min_deg_;
        int hi = std::min(a.trunc_ + b.min_deg_, b.trunc_ + a.min_deg_);
        LaurentSeries r(lo, hi);
        for (int i = a.min_deg_; i <= a.trunc_; ++i) {
            C ai = a.coeff(i);
            if (ai == C(0)) continue;
            for (int j = b.min_deg_; i + j <= hi; ++j) r.at(i + j) += ai * b.coeff(j);
        }
        return r;
    }

    LaurentSeries derivative() const {
        LaurentSeries r(min_deg_ - 1, trunc_ - 1);
        for (int k = min_deg_; k <= trunc_; ++k) r.at(k - 1) = C(k) * coeff(k);
        return r;
    }

    /// Multiplicative inverse; needs a nonzero coefficient at min_deg.
    LaurentSeries inverse() const {
        C lead = coeff(min_deg_);
        if (lead == C(0)) throw ContractError("LaurentSeries::inverse: vanishing leading coefficient");
        int len = trunc_ - min_deg_;
        LaurentSeries r(-min_deg_, -min_deg_ + len);
        for (int n = 0; n <= len; ++n) {
            C s = (n == 0) ? C(1) : C(0);
            for (int j = 1; j <= n; ++j) s -= coeff(min_deg_ + j) * r.coeff(-min_deg_ + n - j);
            r.at(-min_deg_ + n) = s / lead;
        }
        return r;
    }

    template <class X>
    auto eval(const X& x) const {
        using R = decltype(C() * X());
        R s(0);
        for (int k = trunc_; k >= std::max(0, min_deg_); --k) s = s * x + coeff(k);
        for (int k = std::min(-1, trunc_); k >= min_deg_; --k) s += coeff(k) * std::pow(x, k);
        return s;
    }

private:
    int min_deg_ = 0;
    int trunc_ = -1;
    std::vector<C> coeffs_;
};

}  // namespace emzv
