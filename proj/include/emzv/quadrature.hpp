#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "settings.hpp"

namespace emzv {

/// Gauss-Legendre rule on [-1, 1] together with its spectral integration
/// matrix S(i, j) = int_{-1}^{x_i} l_j(s) ds (l_j the Lagrange basis).
template <class Real>
struct PanelRule {
    int n = 0;
    std::vector<Real> x, w;
    std::vector<Real> S;  // row-major n x n

    static PanelRule make(int n) {
        if (n < 2) throw ContractError("PanelRule: need at least two nodes");
        PanelRule r;
        r.n = n;
        r.x.resize(n);
        r.w.resize(n);
        using L = long double;
        const L pi = std::numbers::pi_v<L>;
        for (int i = 0; i < n; ++i) {
            L z = std::cos(pi * (i + L(0.75)) / (n + L(0.5)));
            L dp = 0;
            for (int it = 0; it < 100; ++it) {
                L p0 = 1, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    L p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1);
                L dz = p1 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-19L) break;
            }
            r.x[n - 1 - i] = static_cast<Real>(z);
            r.w[n - 1 - i] = static_cast<Real>(2 / ((1 - z * z) * dp * dp));
        }
        // Legendre values at the nodes, P_k(x_j) for k = 0..n
        std::vector<std::vector<L>> P(n + 1, std::vector<L>(n));
        for (int j = 0; j < n; ++j) {
            L xj = r.x[j];
            P[0][j] = 1;
            P[1][j] = xj;
            for (int k = 2; k <= n; ++k) P[k][j] = ((2 * k - 1) * xj * P[k - 1][j] - (k - 1) * P[k - 2][j]) / k;
        }
        // int_{-1}^{x} P_k = (P_{k+1} - P_{k-1})/(2k+1) for k >= 1, x + 1 for k = 0
        r.S.assign(static_cast<std::size_t>(n) * n, Real(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                L acc = 0;
                for (int k = 0; k < n; ++k) {
                    L ip = (k == 0) ? (r.x[i] + L(1)) : (P[k + 1][i] - P[k - 1][i]) / (2 * k + 1);
                    acc += (2 * k + 1) / L(2) * r.w[j] * P[k][j] * ip;
                }
                r.S[static_cast<std::size_t>(i) * n + j] = static_cast<Real>(acc);
            }
        return r;
    }
};

/// One quadrature node of a path, with the parameter and its complement both
/// kept to full relative accuracy.
template <class Real>
struct PathPoint {
    Real t = 0;                      // parameter in [0, 1]
    Real s = 1;                      // 1 - t
    std::complex<Real> z;            // gamma(t)
    std::complex<Real> from_start;   // gamma(t) - gamma(0)
    std::complex<Real> from_end;     // gamma(t) - gamma(1)
    std::complex<Real> dz;           // gamma'(t)
};

/// Panel decomposition of [0, 1]: geometric panels 2^{-k} toward both ends and
/// uniform panels in the middle, each carrying a Gauss-Legendre rule.
template <class Real>
class SampledPath {
public:
    using Complex = std::complex<Real>;

    /// Straight segment z0 -> z1.
    static SampledPath segment(Complex z0, Complex z1, const Settings& s = {}, int nodes = 0) {
        SampledPath p;
        p.z0_ = z0;
        p.z1_ = z1;
        Complex d = z1 - z0;
        p.build(s, nodes, [=](Real t, Real u) {
            PathPoint<Real> q;
            q.t = t;
            q.s = u;
            q.from_start = t * d;
            q.from_end = -u * d;
            q.z = (t <= Real(0.5)) ? z0 + q.from_start : z1 + q.from_end;
            q.dz = d;
            return q;
        });
        return p;
    }

    /// General smooth path gamma with derivative dgamma on [0, 1].
    static SampledPath curve(std::function<Complex(Real)> gamma, std::function<Complex(Real)> dgamma,
                             const Settings& s = {}, int nodes = 0) {
        SampledPath p;
        p.z0_ = gamma(0);
        p.z1_ = gamma(1);
        Complex z0 = p.z0_, z1 = p.z1_;
        p.build(s, nodes, [=](Real t, Real u) {
            PathPoint<Real> q;
            q.t = t;
            q.s = u;
            q.z = gamma(t);
            q.from_start = q.z - z0;
            q.from_end = q.z - z1;
            q.dz = dgamma(t);
            return q;
        });
        return p;
    }

    Complex start() const { return z0_; }
    Complex end() const { return z1_; }
    const PanelRule<Real>& rule() const { return rule_; }
    int num_panels() const { return static_cast<int>(panels_.size()); }
    int nodes_per_panel() const { return rule_.n; }
    std::size_t size() const { return points_.size(); }
    const std::vector<PathPoint<Real>>& points() const { return points_; }
    /// Half-length of panel p in the parameter t.
    Real half_length(int p) const { return panels_[p].second; }

    /// Same panels split in two: every integral changes by at most the
    /// quadrature error.
    SampledPath refined() const {
        SampledPath r = *this;
        r.panels_.clear();
        r.points_.clear();
        r.levels_ = levels_ + 1;
        r.middle_ = middle_ * 2;
        r.rebuild();
        return r;
    }

private:
    template <class F>
    void build(const Settings& s, int nodes, F make) {
        maker_ = make;
        levels_ = s.grading_levels;
        middle_ = s.middle_panels;
        rule_ = PanelRule<Real>::make(nodes > 0 ? nodes : s.gl_nodes);
        rebuild();
    }

    void rebuild() {
        // panel endpoints described as (a, b, mirrored) with a < b in the
        // coordinate measured from the nearer end
        struct Pan {
            Real a, b;
            bool upper;
        };
        std::vector<Pan> pans;
        auto graded = [&](bool upper) {
            std::vector<Pan> v;
            Real lo = std::ldexp(Real(1), -levels_);
            v.push_back({Real(0), lo, upper});
            for (int k = levels_; k > 2; --k) v.push_back({std::ldexp(Real(1), -k), std::ldexp(Real(1), -k + 1), upper});
            return v;
        };
        auto low = graded(false);
        pans.insert(pans.end(), low.begin(), low.end());
        for (int j = 0; j < middle_; ++j) {
            Real a = Real(0.25) + Real(0.5) * j / middle_;
            Real b = Real(0.25) + Real(0.5) * (j + 1) / middle_;
            pans.push_back({a, b, false});
        }
        auto high = graded(true);
        for (auto it = high.rbegin(); it != high.rend(); ++it) pans.push_back(*it);
        for (const auto& p : pans) {
            Real h = (p.b - p.a) / 2;
            panels_.push_back({p.upper ? Real(1) - p.b : p.a, h});
            for (int i = 0; i < rule_.n; ++i) {
                Real t, u;
                if (!p.upper) {
                    t = p.a + h * (rule_.x[i] + 1);
                    u = Real(1) - t;
                } else {
                    // measured from the end: s runs from b down to a
                    u = p.b - h * (rule_.x[i] + 1);
                    t = Real(1) - u;
                }
                points_.push_back(maker_(t, u));
            }
        }
    }

    Complex z0_, z1_;
    PanelRule<Real> rule_;
    int levels_ = 0, middle_ = 0;
    std::vector<std::pair<Real, Real>> panels_;  // (left end, half length)
    std::vector<PathPoint<Real>> points_;
    std::function<PathPoint<Real>(Real, Real)> maker_;
};

/// Iterated-integral march over a sampled path.  integrands[k][i] is the k-th
/// integrand (already multiplied by gamma') at node i.  Returns
///   G_m(1),  G_1(t) = int_0^t g_1,  G_k(t) = int_0^t g_k(s) G_{k-1}(s) ds,
/// where the product puts the later integrand on the left.
template <class A, class Real>
A chen_march(const SampledPath<Real>& path, const std::vector<const std::vector<A>*>& integrands, const A& zero) {
    const auto& rule = path.rule();
    const int n = rule.n;
    const std::size_t N = path.size();
    if (integrands.empty()) throw ContractError("chen_march: no integrands");
    std::vector<A> prev(N, zero), cur(N, zero), h(n, zero);
    bool first = true;
    A total = zero;
    for (const auto* g : integrands) {
        if (g->size() != N) throw ContractError("chen_march: integrand size mismatch");
        A acc = zero;
        for (int p = 0; p < path.num_panels(); ++p) {
            const Real hl = path.half_length(p);
            const std::size_t off = static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) h[j] = first ? (*g)[off + j] : (*g)[off + j] * prev[off + j];
            for (int i = 0; i < n; ++i) {
                A v = acc;
                const Real* row = &rule.S[static_cast<std::size_t>(i) * n];
                for (int j = 0; j < n; ++j) v += (hl * row[j]) * h[j];
                cur[off + i] = v;
            }
            for (int j = 0; j < n; ++j) acc += (hl * rule.w[j]) * h[j];
        }
        total = acc;
        std::swap(prev, cur);
        first = false;
    }
    return total;
}

}  // namespace emzv
