#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "itint.hpp"
#include "modform.hpp"
#include "quadrature.hpp"
#include "word.hpp"

namespace emzv {

template <class Real = double>
struct EmzvValue {
    IndexWord word;
    std::complex<Real> tau;
    std::complex<Real> value;
    double est_error = 0;
    Kind kind = Kind::I;
};

/// Outcome of one identity check.
struct CheckResult {
    std::string name;
    std::string identity;
    double residual = 0;
    double tolerance = 0;
    std::string detail;
    bool passed() const { return residual < tolerance; }
};

/// Coefficients of one generating series I_{x_1..x_n} (or J) with d_i <= D_max.
template <class Real = double>
struct GenSeries {
    int depth = 0;
    int d_max = 0;
    Kind kind = Kind::I;
    std::map<std::vector<int>, std::complex<Real>> coeff;
};

/// Elliptic multizeta values at a fixed tau.  Kernel and regulator values at
/// the quadrature nodes of [0, 1] and [0, tau] are tabulated once; each word
/// is then a single iterated-integral march.  Results are cached; the cache is
/// guarded, so one engine may be shared between threads.
template <class Real = double>
class Engine {
public:
    using Complex = std::complex<Real>;

    explicit Engine(const LatticeParam<Real>& lat) : lat_(lat), kernels_(lat, lat.settings().max_d) {
        const Settings& s = lat.settings();
        tables_[0] = build(Kind::I, s.gl_nodes);
        tables_[1] = build(Kind::I, s.coarse_gl_nodes);
        tables_[2] = build(Kind::J, s.gl_nodes);
        tables_[3] = build(Kind::J, s.coarse_gl_nodes);
    }

    const LatticeParam<Real>& lattice() const { return lat_; }
    const KernelFamily<Real>& kernels() const { return kernels_; }

    EmzvValue<Real> compute(Kind kind, const IndexWord& w) const {
        check_caps(w);
        {
            std::lock_guard<std::mutex> g(mu_);
            auto it = cache_[idx(kind)].find(w.d);
            if (it != cache_[idx(kind)].end()) return it->second;
        }
        EmzvValue<Real> v{w, lat_.tau(), Complex(0), 0.0, kind};
        if (w.empty()) {
            v.value = Complex(1);
        } else if (!w.all_zero()) {
            Complex fine = march(table(kind, true), w);
            Complex coarse = march(table(kind, false), w);
            v.value = fine;
            v.est_error = static_cast<double>(std::abs(fine - coarse));
        }
        std::lock_guard<std::mutex> g(mu_);
        cache_[idx(kind)].emplace(w.d, v);
        return v;
    }

    EmzvValue<Real> compute_I(const IndexWord& w) const { return compute(Kind::I, w); }
    EmzvValue<Real> compute_J(const IndexWord& w) const { return compute(Kind::J, w); }
    Complex value(Kind kind, const IndexWord& w) const { return compute(kind, w).value; }

    /// All coefficients of the depth-n generating series with d_i <= d_max.
    GenSeries<Real> generating_series(Kind kind, int n, int d_max) const {
        GenSeries<Real> g;
        g.depth = n;
        g.d_max = d_max;
        g.kind = kind;
        std::vector<int> d(static_cast<std::size_t>(n), -1);
        while (true) {
            g.coeff[d] = value(kind, IndexWord(d));
            int k = n - 1;
            while (k >= 0 && d[k] == d_max) d[k--] = -1;
            if (k < 0) break;
            ++d[k];
        }
        return g;
    }

    /// Node values along the I- or J-path: kernels k_d (d = -1..max_d, times
    /// dz/dt) and the regulator.  Exposed for the algebra-valued holonomy.
    struct PathTable {
        SampledPath<Real> path;
        std::vector<std::vector<Complex>> k;  // k[d + 1][node]
        std::vector<Complex> ell;
    };
    const PathTable& table(Kind kind, bool fine = true) const { return tables_[idx(kind) * 2 + (fine ? 0 : 1)]; }

private:
    static int idx(Kind k) { return k == Kind::I ? 0 : 1; }

    void check_caps(const IndexWord& w) const {
        const Settings& s = lat_.settings();
        w.validate();
        if (w.depth() > s.max_depth) throw TruncationError("word depth exceeds the configured cap");
        if (w.weight() > s.max_weight) throw TruncationError("word weight exceeds the configured cap");
        for (int x : w.d)
            if (x > s.max_d) throw TruncationError("word entry exceeds the configured kernel order");
    }

    PathTable build(Kind kind, int nodes) const {
        const Settings& s = lat_.settings();
        Complex end = (kind == Kind::I) ? Complex(1) : lat_.tau();
        PathTable t{SampledPath<Real>::segment(Complex(0), end, s, nodes), {}, {}};
        const int D = s.max_d;
        const std::size_t N = t.path.size();
        t.k.assign(static_cast<std::size_t>(D) + 2, std::vector<Complex>(N));
        t.ell.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            const auto& p = t.path.points()[i];
            bool near_start = p.t <= Real(0.5);
            Complex u = near_start ? p.from_start : p.from_end;
            int m = (!near_start && kind == Kind::I) ? 1 : 0;
            int n = (!near_start && kind == Kind::J) ? 1 : 0;
            LaurentSeries<Complex> s_x =
                (kind == Kind::I) ? kernels_.sigma_shifted(u, m, n) : kernels_.sigma_j_shifted(u, m, n);
            for (int d = -1; d <= D; ++d) t.k[d + 1][i] = s_x.coeff(d) * p.dz;
            t.ell[i] = (kind == Kind::I) ? log_theta_pinned(lat_, u, m, n) : log_theta_j(lat_, u, m, n);
        }
        return t;
    }

    // Coefficient formula: the word k_{d_alpha} .. k_{d_beta} between the
    // boundary weights l^{alpha-1}/(alpha-1)! and (-l)^{n-beta}/(n-beta)!.
    Complex march(const PathTable& t, const IndexWord& w) const {
        const int n = w.depth();
        int a = 0, b = n - 1;
        while (w.d[a] == 0) ++a;
        while (w.d[b] == 0) --b;
        const int lead = a, trail = n - 1 - b;
        const std::size_t N = t.path.size();
        Real fl = std::tgamma(Real(lead + 1)), ft = std::tgamma(Real(trail + 1));
        std::vector<Complex> first(N), last;
        auto weight_lead = [&](std::size_t i) { return std::pow(t.ell[i], lead) / fl; };
        auto weight_trail = [&](std::size_t i) { return std::pow(-t.ell[i], trail) / ft; };
        for (std::size_t i = 0; i < N; ++i) {
            Complex v = t.k[w.d[a] + 1][i];
            if (lead) v *= weight_lead(i);
            if (a == b && trail) v *= weight_trail(i);
            first[i] = v;
        }
        std::vector<const std::vector<Complex>*> seq{&first};
        if (b > a) {
            for (int k = a + 1; k < b; ++k) seq.push_back(&t.k[w.d[k] + 1]);
            last.resize(N);
            for (std::size_t i = 0; i < N; ++i) {
                Complex v = t.k[w.d[b] + 1][i];
                if (trail) v *= weight_trail(i);
                last[i] = v;
            }
            seq.push_back(&last);
        }
        return chen_march(t.path, seq, Complex(0));
    }

    LatticeParam<Real> lat_;
    KernelFamily<Real> kernels_;
    PathTable tables_[4];
    mutable std::mutex mu_;
    mutable std::map<std::vector<int>, EmzvValue<Real>> cache_[2];
};

template <class Real>
EmzvValue<Real> compute_I(const Engine<Real>& e, const IndexWord& w) {
    return e.compute_I(w);
}
template <class Real>
EmzvValue<Real> compute_J(const Engine<Real>& e, const IndexWord& w) {
    return e.compute_J(w);
}

/// All (n, m)-shuffles of two words, with multiplicity.
inline std::vector<IndexWord> shuffles(const IndexWord& u, const IndexWord& v) {
    std::vector<IndexWord> out;
    const std::size_t n = u.d.size(), m = v.d.size();
    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> void {
        if (i == n && j == m) {
            out.emplace_back(cur);
            return;
        }
        if (i < n) {
            cur.push_back(u.d[i]);
            self(self, i + 1, j);
            cur.pop_back();
        }
        if (j < m) {
            cur.push_back(v.d[j]);
            self(self, i, j + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0, 0);
    return out;
}

/// |X_u X_v - sum over shuffles X_w|.
template <class Real>
double check_shuffle(const Engine<Real>& e, const IndexWord& left, const IndexWord& right, Kind kind) {
    std::complex<Real> s = e.value(kind, left) * e.value(kind, right);
    for (const auto& w : shuffles(left, right)) s -= e.value(kind, w);
    return static_cast<double>(std::abs(s));
}

/// |sum_k (-1)^{d_1+..+d_k} X_{d_1..d_k} X_{d_{k+1}..d_n}|.
template <class Real>
double check_reversal(const Engine<Real>& e, const IndexWord& w, Kind kind) {
    std::complex<Real> s(0);
    int partial = 0;
    const std::size_t n = w.d.size();
    for (std::size_t k = 0; k <= n; ++k) {
        if (k > 0) partial += w.d[k - 1];
        Real sign = (partial % 2) ? Real(-1) : Real(1);
        s += sign * e.value(kind, w.slice(0, k)) * e.value(kind, w.slice(k, n));
    }
    return static_cast<double>(std::abs(s));
}

/// Right-hand side of the modular relation for the coefficient J_d(tau):
///   sum_{a+b <= n-1} (-1)^b/(a! b!) (log tau)^{a+b} [x^d] I_{x_{a+1}/tau..x_{n-b}/tau}(-1/tau),
/// with Im log tau in (0, pi).  `inv` must be an engine at -1/tau.
template <class Real>
std::complex<Real> modular_rhs(const Engine<Real>& inv, std::complex<Real> tau, const IndexWord& w) {
    using Complex = std::complex<Real>;
    const int n = w.depth();
    const Complex lt = std::log(tau);
    Complex s(0);
    for (int a = 0; a < n; ++a) {
        if (a > 0 && w.d[a - 1] != 0) break;
        for (int b = 0; a + b < n; ++b) {
            if (b > 0 && w.d[n - b] != 0) break;
            IndexWord mid = w.slice(a, n - b);
            Complex v = inv.value(Kind::I, mid);
            if (v == Complex(0)) continue;
            Real c = ((b % 2) ? Real(-1) : Real(1)) / (std::tgamma(Real(a + 1)) * std::tgamma(Real(b + 1)));
            s += c * std::pow(lt, a + b) * std::pow(tau, -mid.sum()) * v;
        }
    }
    return s;
}

/// Max residual of the modular relation over all words of depth 1..n with
/// entries <= d_max.
template <class Real>
double check_modular(const Engine<Real>& at_tau, const Engine<Real>& at_inv, int n, int d_max) {
    const std::complex<Real> tau = at_tau.lattice().tau();
    if (std::abs(at_inv.lattice().tau() + Real(1) / tau) > 1e-12 * std::abs(tau))
        throw ContractError("check_modular: second engine must sit at -1/tau");
    double worst = 0;
    for (int m = 1; m <= n; ++m) {
        auto g = at_tau.generating_series(Kind::J, m, d_max);
        for (const auto& [d, v] : g.coeff) {
            double r = static_cast<double>(std::abs(v - modular_rhs(at_inv, tau, IndexWord(d))));
            worst = std::max(worst, r);
        }
    }
    return worst;
}

/// Engines at tau + k h (k = -2..2) for the tau-derivative in the
/// differential system.
template <class Real = double>
class OdeContext {
public:
    using Complex = std::complex<Real>;
    OdeContext(const LatticeParam<Real>& lat, double h) : h_(h) {
        for (int k = -2; k <= 2; ++k)
            engines_.push_back(std::make_unique<Engine<Real>>(LatticeParam<Real>(lat.tau() + Real(k * h), lat.settings())));
    }
    const Engine<Real>& center() const { return *engines_[2]; }
    /// Engine at tau + k h, k = -2..2.
    const Engine<Real>& engine(int k) const {
        if (k < -2 || k > 2) throw ContractError("OdeContext::engine: offset out of range");
        return *engines_[k + 2];
    }
    double step() const { return h_; }

    /// 2 pi i d/dtau X_d by the five-point central difference.
    Complex lhs(Kind kind, const IndexWord& w) const {
        Complex f[5];
        for (int k = 0; k < 5; ++k) f[k] = engines_[k]->value(kind, w);
        Complex d = (-f[4] + Real(8) * f[3] - Real(8) * f[1] + f[0]) / Real(12 * h_);
        return Complex(0, 2 * pi_v<Real>) * d;
    }

    /// Coefficient of x^d in the right-hand side of the differential system.
    Complex rhs(Kind kind, const IndexWord& w) const {
        const Engine<Real>& e = center();
        const int n = w.depth();
        if (n == 0) return Complex(0);
        auto wpt = [&](int deg) -> Complex {  // coefficient of x^deg in wp_tilde
            if (deg < -2 || deg % 2) return Complex(0);
            return Real(deg + 1) * eisenstein(e.lattice(), deg + 2);
        };
        auto wpc = [&](int m) -> Complex {  // coefficient p_m of x^{2m} in wp (m = -1 or >= 1)
            if (m == -1) return Complex(1);
            if (m <= 0) return Complex(0);
            return Real(2 * m + 1) * eisenstein(e.lattice(), 2 * m + 2);
        };
        Complex s = wpt(w.d[0]) * e.value(kind, w.slice(1, n)) - wpt(w.d[n - 1]) * e.value(kind, w.slice(0, n - 1));
        for (int i = 0; i + 1 < n; ++i) {
            const int a = w.d[i], b = w.d[i + 1];
            // (wp(x_{i+1}) - wp(x_i)) (x_i + x_{i+1})^e, coefficient of x_i^a x_{i+1}^b
            for (int ee = -1; ee <= a + b + 2; ++ee) {
                Complex c(0);
                if (ee == -1) {
                    if (a >= 0 && b >= 0 && (a + b) % 2 == 1) c = ((a % 2) ? Real(-1) : Real(1)) * wpc((a + b + 1) / 2);
                } else {
                    int sdeg = a + b - ee;
                    if (sdeg % 2 == 0 && (sdeg == -2 || sdeg >= 2))
                        c = wpc(sdeg / 2) * Real(binom(ee, a) - binom(ee, b));
                }
                if (c == Complex(0)) continue;
                std::vector<int> merged(w.d.begin(), w.d.begin() + i);
                merged.push_back(ee);
                merged.insert(merged.end(), w.d.begin() + i + 2, w.d.end());
                s += c * e.value(kind, IndexWord(merged));
            }
        }
        if (kind == Kind::J)
            s -= Complex(0, 2 * pi_v<Real>) / e.lattice().tau() * Real(w.sum()) * e.value(kind, w);
        return s;
    }

    /// Signed residual LHS - RHS.
    Complex residual(Kind kind, const IndexWord& w) const { return lhs(kind, w) - rhs(kind, w); }

private:
    static double binom(int n, int k) {
        if (k < 0 || k > n || n < 0) return 0;
        double r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    }
    double h_;
    std::vector<std::unique_ptr<Engine<Real>>> engines_;
};

template <class Real>
double check_ode(const OdeContext<Real>& ctx, const IndexWord& w, Kind kind) {
    if (w.depth() < 1) throw ContractError("check_ode: need a nonempty word");
    return static_cast<double>(std::abs(ctx.residual(kind, w)));
}

}  // namespace emzv
