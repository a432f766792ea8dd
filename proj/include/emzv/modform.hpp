#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "laurent.hpp"
#include "settings.hpp"

namespace emzv {

template <class Real>
inline constexpr Real pi_v = std::numbers::pi_v<Real>;

/// The modulus tau in the upper half plane, with q = exp(2 pi i tau) cached.
template <class Real = double>
class LatticeParam {
public:
    using Complex = std::complex<Real>;

    explicit LatticeParam(Complex tau, const Settings& s = {}) : tau_(tau), settings_(s) {
        if (!(tau.imag() > Real(0))) throw ContractError("LatticeParam: Im(tau) must be positive");
        const Complex two_pi_i(0, 2 * pi_v<Real>);
        q_ = std::exp(two_pi_i * tau);
        Real aq = std::abs(q_);
        int n = 1;
        Real p = aq;
        while (p >= Real(s.q_tolerance) && n < s.q_cap) {
            p *= aq;
            ++n;
        }
        trunc_q_ = n;
        qpow_.resize(static_cast<std::size_t>(n) + 1);
        qpow_[0] = Complex(1);
        for (int k = 1; k <= n; ++k) qpow_[k] = qpow_[k - 1] * q_;
    }

    Complex tau() const { return tau_; }
    Complex q() const { return q_; }
    int trunc_q() const { return trunc_q_; }
    const Settings& settings() const { return settings_; }
    /// q^n for 0 <= n <= trunc_q.
    Complex qpow(int n) const { return qpow_[static_cast<std::size_t>(n)]; }

    /// Lattice -1/tau with the same settings.
    LatticeParam inverted() const { return LatticeParam(Complex(-1) / tau_, settings_); }

private:
    Complex tau_;
    Complex q_;
    int trunc_q_ = 0;
    std::vector<Complex> qpow_;
    Settings settings_;
};

namespace detail {

template <class Real>
void check_im_range(const std::complex<Real>& z) {
    if (std::abs(z.imag()) > Real(60))
        throw NumericError("theta: |Im z| out of evaluation range", static_cast<double>(std::abs(z.imag())));
}

// Number of product factors needed at z: the plain truncation plus the
// factors where |q^n e^{-2 pi i z}| is still large.
// e^z - 1 without cancellation for small z.
template <class Real>
std::complex<Real> cexpm1(const std::complex<Real>& z) {
    Real ex = std::expm1(z.real());
    Real sh = std::sin(z.imag() / 2);
    return {ex * std::cos(z.imag()) - 2 * sh * sh, (ex + 1) * std::sin(z.imag())};
}

template <class Real>
int factors_needed(const LatticeParam<Real>& lat, const std::complex<Real>& z) {
    Real extra = std::abs(z.imag()) / lat.tau().imag();
    return lat.trunc_q() + static_cast<int>(std::ceil(extra)) + 1;
}

template <class Real>
std::complex<Real> qn(const LatticeParam<Real>& lat, int n) {
    if (n <= lat.trunc_q()) return lat.qpow(n);
    return std::exp(std::complex<Real>(0, 2 * pi_v<Real> * n) * lat.tau());
}

// Jacobi-series weights a_n = (-1)^n exp(i pi tau n(n+1)), plus the
// normalisation 2 pi sum a_n (2n+1) making theta'(0) = 1.
template <class Real>
struct JacobiData {
    std::vector<std::complex<Real>> a;
    std::complex<Real> norm;
};

template <class Real>
JacobiData<Real> jacobi_data(const LatticeParam<Real>& lat, Real max_im_z, int max_j) {
    using Complex = std::complex<Real>;
    const Real pi = pi_v<Real>;
    JacobiData<Real> d;
    const Real im_tau = lat.tau().imag();
    for (int n = 0; n < 400; ++n) {
        Real logmag = -pi * im_tau * n * (n + 1) + (2 * n + 1) * pi * max_im_z;
        Real growth = 0;
        if (max_j > 0) growth = std::min<Real>(max_j * std::log((2 * n + 1) * pi), (2 * n + 1) * pi);
        if (n >= 2 && logmag + growth < Real(-48)) break;
        Complex phase = std::exp(Complex(0, pi * n * (n + 1)) * lat.tau());
        d.a.push_back((n % 2 ? Real(-1) : Real(1)) * phase);
    }
    Complex s(0);
    for (std::size_t n = 0; n < d.a.size(); ++n) s += d.a[n] * Real(2 * n + 1);
    d.norm = 2 * pi * s;
    return d;
}

}  // namespace detail

/// theta_tau(z) from the normalised product
/// (sin pi z / pi) prod_n (1 - q^n w)(1 - q^n / w) / (1 - q^n)^2,  w = e^{2 pi i z}.
template <class Real>
std::complex<Real> theta(const LatticeParam<Real>& lat, std::complex<Real> z) {
    using Complex = std::complex<Real>;
    detail::check_im_range(z);
    const Real pi = pi_v<Real>;
    Complex w = std::exp(Complex(0, 2 * pi) * z);
    Complex winv = Real(1) / w;
    Complex prod = std::sin(pi * z) / pi;
    int nmax = detail::factors_needed(lat, z);
    for (int n = 1; n <= nmax; ++n) {
        Complex qn = detail::qn(lat, n);
        Complex den = Real(1) - qn;
        prod *= (Real(1) - qn * w) * (Real(1) - qn * winv) / (den * den);
    }
    return prod;
}

/// Logarithmic derivative theta'/theta(z) from the product.
template <class Real>
std::complex<Real> theta_log_derivative(const LatticeParam<Real>& lat, std::complex<Real> z) {
    using Complex = std::complex<Real>;
    detail::check_im_range(z);
    const Real pi = pi_v<Real>;
    const Complex tpi(0, 2 * pi);
    Complex w = std::exp(tpi * z);
    Complex s = pi * std::cos(pi * z) / std::sin(pi * z);
    int nmax = detail::factors_needed(lat, z);
    for (int n = 1; n <= nmax; ++n) {
        Complex qn = detail::qn(lat, n);
        Complex v = qn * w, u = qn / w;
        s += tpi * (-v / (Real(1) - v) + u / (Real(1) - u));
    }
    return s;
}

/// Derivative of theta'/theta; equals -wp_tilde.
template <class Real>
std::complex<Real> theta_log_derivative2(const LatticeParam<Real>& lat, std::complex<Real> z) {
    using Complex = std::complex<Real>;
    detail::check_im_range(z);
    const Real pi = pi_v<Real>;
    const Complex tpi(0, 2 * pi);
    Complex w = std::exp(tpi * z);
    Complex sn = std::sin(pi * z);
    Complex s = -pi * pi / (sn * sn);
    int nmax = detail::factors_needed(lat, z);
    for (int n = 1; n <= nmax; ++n) {
        Complex qn = detail::qn(lat, n);
        Complex v = qn * w, u = qn / w;
        Complex dv = Real(1) - v, du = Real(1) - u;
        s -= tpi * tpi * (v / (dv * dv) + u / (du * du));
    }
    return s;
}

/// Branch of log(-2 pi i theta(z)) for z = u + m + n tau, n in {0, 1}, that is
/// continuous on the strip 0 <= Im z < Im tau minus the integers and equals
/// log(-2 pi i z) + o(1) as z -> 0+.  The offset u is taken relative to the
/// lattice point m + n tau so that values near that point keep full accuracy.
template <class Real>
std::complex<Real> log_theta_pinned(const LatticeParam<Real>& lat, std::complex<Real> u, int m = 0, int n = 0) {
    using Complex = std::complex<Real>;
    if (n != 0 && n != 1) throw ContractError("log_theta_pinned: lattice row must be 0 or 1");
    if (u == Complex(0)) throw SingularPointError("log_theta: evaluation at a lattice point");
    const Real pi = pi_v<Real>;
    const Complex tpi(0, 2 * pi);
    Complex z = u + Real(m) + Real(n) * lat.tau();
    if (z.imag() < -Real(1e-12) * lat.tau().imag() || z.imag() > lat.tau().imag() * (1 + Real(1e-12)))
        throw ContractError("log_theta_pinned: point outside the strip 0 <= Im z <= Im tau");
    Complex eu = std::exp(tpi * u);
    // w = e^{2 pi i z} = e^{2 pi i u} q^n
    Complex w = (n == 0) ? eu : eu * lat.q();
    Complex s = Complex(0, -pi) * z;
    s += (n == 0) ? std::log(-detail::cexpm1(tpi * u)) : std::log(Real(1) - w);
    int nmax = detail::factors_needed(lat, z);
    for (int k = 1; k <= nmax; ++k) {
        Complex qk = detail::qn(lat, k);
        s += std::log(Real(1) - qk * w);
        if (n == 1 && k == 1)
            s += std::log(-detail::cexpm1(Complex(-tpi * u)));  // 1 - q/w with q/w = e^{-2 pi i u}
        else
            s += std::log(Real(1) - qk / w);
        s -= Real(2) * std::log(Real(1) - qk);
    }
    return s;
}

/// Regulator of the J-integrals: log(-2 pi i e^{i pi z^2/tau} theta(z)).
template <class Real>
std::complex<Real> log_theta_j(const LatticeParam<Real>& lat, std::complex<Real> u, int m = 0, int n = 0) {
    using Complex = std::complex<Real>;
    Complex z = u + Real(m) + Real(n) * lat.tau();
    return log_theta_pinned(lat, u, m, n) + Complex(0, pi_v<Real>) * z * z / lat.tau();
}

/// Continuous branch of log(-2 pi i theta) along a sampled path, by phase
/// unwinding.  The first point must be close to 0 (pinned through
/// log(-2 pi i z)); steps whose phase jump exceeds pi/4 are subdivided and a
/// jump of pi/2 after subdivision is an error.  Returns one value per point.
template <class Real>
std::vector<std::complex<Real>> log_theta_along(const LatticeParam<Real>& lat,
                                                const std::vector<std::complex<Real>>& points) {
    using Complex = std::complex<Real>;
    const Real pi = pi_v<Real>;
    std::vector<Complex> out;
    if (points.empty()) return out;
    Complex z0 = points.front();
    if (std::abs(z0) > Real(0.25)) throw ContractError("log_theta_along: path must start near 0");
    if (z0 == Complex(0)) throw SingularPointError("log_theta_along: starting point on the lattice");
    const Complex mtpi(0, -2 * pi);
    auto raw = [&](Complex z) { return mtpi * theta(lat, z); };
    // pin: log(-2 pi i z) + principal log(theta(z)/z), the latter close to 0
    Complex cur = std::log(mtpi * z0) + std::log(theta(lat, z0) / z0);
    out.push_back(cur);
    Real phase = cur.imag();
    Complex prev_val = raw(z0);
    auto advance = [&](auto&& self, Complex za, Complex zb, Complex va, int depth) -> Complex {
        Complex vb = raw(zb);
        if (vb == Complex(0)) throw SingularPointError("log_theta_along: path meets a zero of theta");
        Real jump = std::arg(vb / va);
        if (std::abs(jump) >= pi / 4 && depth < 30) {
            Complex zm = (za + zb) / Real(2);
            Complex vm = self(self, za, zm, va, depth + 1);
            return self(self, zm, zb, vm, depth + 1);
        }
        if (std::abs(jump) >= pi / 2)
            throw NumericError("log_theta_along: phase jump too large after refinement", static_cast<double>(jump));
        phase += jump;
        return vb;
    };
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k] == Complex(0)) throw SingularPointError("log_theta_along: point on the lattice");
        prev_val = advance(advance, points[k - 1], points[k], prev_val, 0);
        out.emplace_back(std::log(std::abs(prev_val)), phase);
    }
    return out;
}

/// Riemann zeta at an integer k >= 2.
template <class Real>
Real zeta_int(int k) {
    return static_cast<Real>(std::riemann_zeta(static_cast<long double>(k)));
}

/// q-expansion coefficient g_{k}(n) of G_k: 2 zeta(k) at n = 0, and
/// 2 (2 pi i)^k / (k-1)! sigma_{k-1}(n) for n > 0.
template <class Real>
std::complex<Real> eisenstein_coefficient(int k, long n) {
    using Complex = std::complex<Real>;
    if (k < 2 || k % 2) throw ContractError("eisenstein_coefficient: k must be even and >= 2");
    if (n == 0) return Complex(2 * zeta_int<Real>(k));
    Real sig = 0;
    for (long d = 1; d <= n; ++d)
        if (n % d == 0) sig += std::pow(static_cast<Real>(d), k - 1);
    Real mag = std::exp(k * std::log(2 * pi_v<Real>) - std::lgamma(static_cast<Real>(k)));
    Real sign = ((k / 2) % 2) ? Real(-1) : Real(1);  // i^k
    return Complex(2 * sign * mag * sig);
}

/// Eisenstein series G_k(tau) by its q-expansion (G_0 = -1, G_2 included).
template <class Real>
std::complex<Real> eisenstein(const LatticeParam<Real>& lat, int k) {
    using Complex = std::complex<Real>;
    if (k < 0 || k % 2) throw ContractError("eisenstein: k must be even and >= 0");
    if (k == 0) return Complex(-1);
    const Real pi = pi_v<Real>;
    const Complex logq = Complex(0, 2 * pi) * lat.tau();
    // sum_{m>=1} m^{k-1} q^m / (1 - q^m), the divisor sum regrouped
    Complex s(0);
    for (int m = 1; m < 100000; ++m) {
        Complex qm = std::exp(Real(m) * logq);
        Complex term = std::exp(Real(k - 1) * std::log(static_cast<Real>(m)) + Real(m) * logq) / (Real(1) - qm);
        s += term;
        if (std::abs(term) < Real(1e-19) * (Real(1) + std::abs(s)) && m > 2) break;
    }
    Real mag = std::exp(k * std::log(2 * pi) - std::lgamma(static_cast<Real>(k)));
    Real sign = ((k / 2) % 2) ? Real(-1) : Real(1);
    return Complex(2 * zeta_int<Real>(k)) + Real(2) * sign * mag * s;
}

/// wp_tilde(x) = sum_{n >= -1} (2n+1) G_{2n+2} x^{2n}, kept through degree `order`.
template <class Real>
LaurentSeries<std::complex<Real>> wp_tilde_series(const LatticeParam<Real>& lat, int order) {
    if (order < -2) throw ContractError("wp_tilde_series: order must be >= -2");
    LaurentSeries<std::complex<Real>> s(-2, order);
    for (int e = -2; e <= order; e += 2) {
        int n = e / 2;
        s.at(e) = Real(2 * n + 1) * eisenstein(lat, 2 * n + 2);
    }
    return s;
}

/// Weierstrass wp(x) = wp_tilde(x) - G_2, from the product.
template <class Real>
std::complex<Real> wp(const LatticeParam<Real>& lat, std::complex<Real> x) {
    return -theta_log_derivative2(lat, x) - eisenstein(lat, 2);
}

/// Taylor coefficients theta^{(j)}(z)/j!, j = 0..J, from the Jacobi series
/// differentiated term by term.
template <class Real>
std::vector<std::complex<Real>> theta_taylor(const LatticeParam<Real>& lat, std::complex<Real> z, int J,
                                             const detail::JacobiData<Real>* pre = nullptr) {
    using Complex = std::complex<Real>;
    detail::check_im_range(z);
    const Real pi = pi_v<Real>;
    detail::JacobiData<Real> own;
    if (!pre) {
        own = detail::jacobi_data(lat, std::abs(z.imag()), J);
        pre = &own;
    }
    std::vector<Complex> t(static_cast<std::size_t>(J) + 1, Complex(0));
    for (std::size_t n = 0; n < pre->a.size(); ++n) {
        Real fr = (2 * n + 1) * pi;
        Complex arg = fr * z;
        Complex sn = std::sin(arg), cs = std::cos(arg);
        Real scale = 1;  // fr^j / j!
        for (int j = 0; j <= J; ++j) {
            if (j > 0) scale *= fr / j;
            Complex trig;
            switch (j % 4) {
                case 0: trig = sn; break;
                case 1: trig = cs; break;
                case 2: trig = -sn; break;
                default: trig = -cs; break;
            }
            t[j] += pre->a[n] * scale * trig;
        }
    }
    for (auto& c : t) c *= Real(2) / pre->norm;
    return t;
}

/// Expansion data and evaluator for the Kronecker-Eisenstein kernels
///   sigma_x(z) = theta(z+x)/(theta(z) theta(x)) = 1/x + sum_n k_n(z) x^n.
/// Near lattice points a bivariate expansion of the regular part is used; the
/// quasi-periodicity sigma_x(z + m + n tau) = e^{-2 pi i n x} sigma_x(z) moves
/// every evaluation to the cell around 0.
template <class Real = double>
class KernelFamily {
public:
    using Complex = std::complex<Real>;
    using Series = LaurentSeries<Complex>;

    KernelFamily(const LatticeParam<Real>& lat, int order) : lat_(lat), order_(order) {
        if (order < 0) throw ContractError("KernelFamily: order must be >= 0");
        const Settings& s = lat.settings();
        M_ = s.local_order;
        radius_ = static_cast<Real>(s.local_radius);
        int top = order_ + M_ + 4;
        jac0_ = detail::jacobi_data(lat, Real(0), top + 1);
        mid_jac_ = detail::jacobi_data(lat, lat.tau().imag() + Real(1), order_ + 2);
        auto t0 = theta_taylor(lat, Complex(0), top + 1, &jac0_);
        // theta(x)/x = sum_j a_j x^{2j}
        int J = top / 2 + 1;
        std::vector<Complex> a(J + 1);
        for (int j = 0; j <= J; ++j) a[j] = t0[2 * j + 1];
        // log(theta(x)/x) = sum_j r_j x^{2j}
        r_.assign(J + 1, Complex(0));
        for (int j = 1; j <= J; ++j) {
            Complex acc = a[j];
            for (int i = 1; i < j; ++i) acc -= Real(i) / Real(j) * r_[i] * a[j - i];
            r_[j] = acc;
        }
        // 1/theta(x) as a Laurent series from -1 to order_
        Series th(1, 2 * J + 1);
        for (int j = 0; j <= J; ++j) th.at(2 * j + 1) = a[j];
        inv_theta_ = th.inverse().truncated(order_);
        build_local();
    }

    const LatticeParam<Real>& lattice() const { return lat_; }
    int order() const { return order_; }

    /// log(theta(x)/x) = sum_j r_j x^{2j}; r_j = -G_{2j}/(2j).
    const std::vector<Complex>& log_theta_coeffs() const { return r_; }
    /// Regular part coefficients: sigma_x(u) - 1/x - 1/u = sum c_{n,m} x^n u^m.
    Complex local_coeff(int n, int m) const { return c_[n][m]; }
    int local_order() const { return M_; }

    /// sigma_x(z) through x^order.
    Series sigma(Complex z) const { return sigma_shifted(z, 0, 0); }

    /// sigma_x(u + m + n tau) with the offset u given separately for accuracy.
    Series sigma_shifted(Complex u, int /*m*/, int n) const {
        auto [v, mm, nn] = reduce(u);
        (void)mm;
        int ntot = n + nn;
        Series base = (std::abs(v) < radius_) ? local(v) : mid(v);
        if (ntot == 0) return base;
        // multiply by e^{-2 pi i ntot x}
        return exp_series(Complex(0, -2 * pi_v<Real> * ntot)) * base;
    }

    /// J-kernels: e^{2 pi i x z / tau} sigma_x(z) = 1/x + sum_n ktilde_n(z) x^n,
    /// evaluated at z = u + m + n tau.
    Series sigma_j_shifted(Complex u, int m, int /*n*/) const {
        auto [v, mm, nn] = reduce(u);
        (void)nn;
        int mtot = m + mm;
        Series base = (std::abs(v) < radius_) ? local(v) : mid(v);
        const Complex tpi(0, 2 * pi_v<Real>);
        // K_x(v + mtot + ntot tau) = e^{2 pi i x mtot / tau} K_x(v)
        Series r = exp_series(tpi * v / lat_.tau()) * base;
        if (mtot != 0) r = exp_series(tpi * Real(mtot) / lat_.tau()) * r;
        return r;
    }
    Series sigma_j(Complex z) const { return sigma_j_shifted(z, 0, 0); }

    /// Split z = v + m + n tau with v the offset to the nearest lattice point.
    std::tuple<Complex, int, int> reduce(Complex z) const {
        Real im_tau = lat_.tau().imag();
        Real b = z.imag() / im_tau;
        Real a = z.real() - b * lat_.tau().real();
        int m0 = static_cast<int>(std::lround(a)), n0 = static_cast<int>(std::lround(b));
        Complex best = z - Real(m0) - Real(n0) * lat_.tau();
        int bm = m0, bn = n0;
        for (int dm = -1; dm <= 1; ++dm)
            for (int dn = -1; dn <= 1; ++dn) {
                Complex v = z - Real(m0 + dm) - Real(n0 + dn) * lat_.tau();
                if (std::abs(v) < std::abs(best)) {
                    best = v;
                    bm = m0 + dm;
                    bn = n0 + dn;
                }
            }
        return {best, bm, bn};
    }

private:
    // e^{c x} truncated at order_
    Series exp_series(Complex c) const {
        Series e(0, order_ + 1);
        Complex p(1);
        for (int j = 0; j <= order_ + 1; ++j) {
            e.at(j) = p;
            p *= c / Real(j + 1);
        }
        return e;
    }

    Series local(Complex v) const {
        if (v == Complex(0)) throw SingularPointError("sigma kernels: evaluation at a lattice point");
        Series s(-1, order_);
        s.at(-1) = Complex(1);
        for (int n = 0; n <= order_; ++n) {
            Complex acc(0);
            for (int m = M_; m >= 0; --m) acc = acc * v + c_[n][m];
            s.at(n) = acc;
        }
        s.at(0) += Real(1) / v;
        return s;
    }

    Series mid(Complex v) const {
        auto t = theta_taylor(lat_, v, order_ + 1, &mid_jac_);
        Series num(0, order_ + 1);
        for (int j = 0; j <= order_ + 1; ++j) num.at(j) = t[j] / t[0];
        return (num * inv_theta_).truncated(order_);
    }

    void build_local() {
        // Q(x,z) = R(x+z) - R(x) - R(z), with R(x) = sum r_j x^{2j}
        int NX = order_ + 1, NZ = M_ + 1;
        std::vector<std::vector<Complex>> Q(NX + 1, std::vector<Complex>(NZ + 1, Complex(0)));
        std::vector<std::vector<Real>> binom(NX + NZ + 2, std::vector<Real>(NX + NZ + 2, 0));
        for (int i = 0; i <= NX + NZ + 1; ++i) {
            binom[i][0] = 1;
            for (int j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0);
        }
        for (int a = 1; a <= NX; ++a)
            for (int b = 1; b <= NZ; ++b)
                if ((a + b) % 2 == 0) {
                    std::size_t j = static_cast<std::size_t>((a + b) / 2);
                    if (j < r_.size()) Q[a][b] = r_[j] * binom[a + b][a];
                }
        // E = exp(Q) via a E_{a,.} = sum_i i Q_{i,.} * E_{a-i,.}
        std::vector<std::vector<Complex>> E(NX + 1, std::vector<Complex>(NZ + 1, Complex(0)));
        E[0][0] = Complex(1);
        for (int a = 1; a <= NX; ++a)
            for (int b = 0; b <= NZ; ++b) {
                Complex acc(0);
                for (int i = 1; i <= a; ++i)
                    for (int j = 0; j <= b; ++j) acc += Real(i) * Q[i][j] * E[a - i][b - j];
                E[a][b] = acc / Real(a);
            }
        // c_{n,m} = e_{n,m+1} + e_{n+1,m}, e = E - 1
        c_.assign(order_ + 1, std::vector<Complex>(M_ + 1, Complex(0)));
        for (int n = 0; n <= order_; ++n)
            for (int m = 0; m <= M_; ++m) {
                c_[n][m] = E[n][m + 1] + E[n + 1][m];
            }
    }

    LatticeParam<Real> lat_;
    int order_;
    int M_;
    Real radius_;
    detail::JacobiData<Real> jac0_, mid_jac_;
    std::vector<Complex> r_;
    Series inv_theta_;
    std::vector<std::vector<Complex>> c_;
};

/// sigma_x(z) = 1/x + sum_{n <= order} k_n(z) x^n at a single point.
template <class Real>
LaurentSeries<std::complex<Real>> sigma_kernels(const LatticeParam<Real>& lat, std::complex<Real> z, int order) {
    return KernelFamily<Real>(lat, order).sigma(z);
}

}  // namespace emzv
