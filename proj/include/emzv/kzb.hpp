#pragma once

#include <Eigen/Dense>
#include <boost/math/special_functions/bernoulli.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include "emzv.hpp"
#include "freelie.hpp"
#include "itint.hpp"
#include "ncseries.hpp"

namespace emzv {

using Cx = std::complex<double>;
using CSeries = NcSeries<Cx>;

// itint algebra hooks for complex series
inline CSeries algebra_unit(const CSeries& a) { return CSeries::one(a.trunc()); }
inline CSeries algebra_zero(const CSeries& a) { return CSeries(a.trunc()); }
inline double algebra_norm(const CSeries& a) { return a.max_abs(); }

inline CSeries to_complex(const NcSeries<Rational>& s) {
    CSeries r(s.trunc());
    for (const auto& [w, c] : s.terms()) r.add(w, Cx(static_cast<double>(c)));
    return r;
}
inline Derivation<Cx> to_complex(const Derivation<Rational>& d) { return {to_complex(d.u), to_complex(d.v)}; }

namespace detail {

inline constexpr double kPi = 3.14159265358979323846;
inline const Cx kTwoPiI(0, 2 * kPi);

/// Frobenius solution K(z) of z K' = [a, K] - b z/(1-z) K, K(0) = 1, at z.
inline CSeries kz_frobenius(int N, char a, char b, double z, int max_terms) {
    CSeries A = CSeries::letter(N, a), B = CSeries::letter(N, b);
    CSeries partial = CSeries::one(N), result = CSeries::one(N);
    double zm = 1;
    for (int m = 1; m <= max_terms; ++m) {
        CSeries cur = B * partial * Cx(-1), Km(N);
        // (m - ad_a)^{-1} = sum_k ad_a^k / m^{k+1}; ad_a raises degree
        double inv = 1.0 / m;
        for (int k = 0; k <= N && !cur.is_zero(); ++k) {
            Km += cur * Cx(inv);
            inv /= m;
            cur = A * cur - cur * A;
        }
        partial += Km;
        zm *= z;
        result += Km * Cx(zm);
        if (m > 8 && Km.max_abs() * zm < 1e-19) break;
    }
    return result;
}

}  // namespace detail

/// KZ associator Phi(a, b) = H_1^{-1} H_0 for H' = (a/z + b/(z-1)) H, with a
/// stored as the letter 'x' and b as 'y'.  Both normalised solutions are
/// expanded in convergent Frobenius series and compared at z = 1/2:
///   Phi = (1/2)^{-b} K_ba(1/2)^{-1} K_ab(1/2) (1/2)^a.
inline CSeries kz_associator(int N, int max_terms = 400) {
    if (N < 0) throw ContractError("kz_associator: negative truncation");
    const double l2 = std::log(2.0);
    CSeries Kab = detail::kz_frobenius(N, 'x', 'y', 0.5, max_terms);
    CSeries Kba = detail::kz_frobenius(N, 'y', 'x', 0.5, max_terms);
    CSeries ea = nc_exp(CSeries::x(N) * Cx(-l2));
    CSeries eb = nc_exp(CSeries::y(N) * Cx(l2));
    return eb * nc_inverse(Kba) * Kab * ea;
}

/// Evaluate Phi(a, b) at series a, b (no constant terms).
inline CSeries associator_at(const CSeries& phi, const CSeries& a, const CSeries& b) { return substitute(phi, a, b); }

/// A(tau) or B(tau) as a truncated series in x, y.
struct KzbSeries {
    CSeries series;
    Cx tau;
    int trunc = 0;
};

inline CSeries t_series(int N) { return to_complex(t_element<Rational>(N)); }

/// sum_n (-1)^n sum_d X_{d_1..d_n} b_{d_n} .. b_{d_1} over words of weight <= N.
inline CSeries dictionary_series(const Engine<double>& e, Kind kind, int N) {
    CSeries r = CSeries::one(N);
    for (const auto& w : words_up_to_weight(N)) {
        Cx v = e.value(kind, w);
        if (v == Cx(0)) continue;
        std::vector<int> rev(w.d.rbegin(), w.d.rend());
        r += b_word<Cx>(rev, N) * ((w.depth() % 2) ? -v : v);
    }
    return r;
}

/// A(tau) = e^{-i pi t} (assembled I-series).
inline KzbSeries assemble_A(const Engine<double>& e, int N) {
    CSeries M = dictionary_series(e, Kind::I, N);
    return {nc_exp(t_series(N) * Cx(0, -detail::kPi)) * M, e.lattice().tau(), N};
}

/// B(tau) = e^{i pi t} exp(-(2 pi i/tau) e+)(assembled J-series).
inline KzbSeries assemble_B(const Engine<double>& e, int N) {
    const Cx tau = e.lattice().tau();
    CSeries Jsum = dictionary_series(e, Kind::J, N);
    Derivation<Cx> ep = to_complex(e_plus(N).d);
    CSeries inner = apply_exp(ep, Jsum, -detail::kTwoPiI / tau);
    return {nc_exp(t_series(N) * Cx(0, detail::kPi)) * inner, tau, N};
}

/// Sign automorphism x -> -x, y -> -y (the (2,1) exchange on f2).
inline CSeries sign_flip(const CSeries& s) {
    CSeries r(s.trunc());
    for (const auto& [w, c] : s.terms()) r.add(w, (w.size() % 2) ? -c : c);
    return r;
}

struct GroupResiduals {
    double a_relation = 0;   // e^{i pi t} A e^{i pi t} A^{2,1} - 1
    double b_relation = 0;   // e^{-i pi t} B e^{-i pi t} B^{2,1} - 1
    double commutator = 0;   // A B A^{-1} B^{-1} - e^{-2 pi i t}
    double minus_identity_a = 0;  // A^{2,1} - e^{-i pi t} A^{-1} e^{-i pi t}
    double minus_identity_b = 0;  // B^{2,1} - e^{i pi t} B^{-1} e^{i pi t}
};

inline GroupResiduals check_group_relations(const KzbSeries& A, const KzbSeries& B) {
    const int N = std::min(A.trunc, B.trunc);
    if (N < 1) throw ContractError("check_group_relations: truncation too small");
    CSeries t = t_series(N), one = CSeries::one(N);
    CSeries ep = nc_exp(t * Cx(0, detail::kPi)), em = nc_exp(t * Cx(0, -detail::kPi));
    const CSeries &a = A.series, &b = B.series;
    CSeries ai = nc_inverse(a), bi = nc_inverse(b);
    GroupResiduals r;
    r.a_relation = (ep * a * ep * sign_flip(a) - one).max_abs();
    r.b_relation = (em * b * em * sign_flip(b) - one).max_abs();
    r.commutator = (a * b * ai * bi - nc_exp(t * Cx(0, -2 * detail::kPi))).max_abs();
    r.minus_identity_a = (sign_flip(a) - em * ai * em).max_abs();
    r.minus_identity_b = (sign_flip(b) - ep * bi * ep).max_abs();
    return r;
}

/// sum_{n >= -1, 2n+2 <= N} (2n+1) G_{2n+2}(tau) delta_{2n}.
inline Derivation<Cx> eisenstein_derivation(const LatticeParam<double>& lat, int N) {
    Derivation<Cx> D{CSeries(N), CSeries(N)};
    for (int n2 = -2; n2 + 2 <= N; n2 += 2) {
        Cx g = eisenstein(lat, n2 + 2);
        D = D + Cx(n2 + 1) * g * to_complex(delta(n2, N).d);
    }
    return D;
}

namespace detail {

template <class F>
CSeries five_point(const OdeContext<double>& ctx, F&& at) {
    CSeries s[5];
    for (int k = -2; k <= 2; ++k) s[k + 2] = at(ctx.engine(k));
    CSeries d = (s[0] - s[4] + (s[3] - s[1]) * Cx(8)) * Cx(1.0 / (12 * ctx.step()));
    return d * kTwoPiI;
}

}  // namespace detail

struct KzbOdeResiduals {
    double a_equation = 0;
    double b_equation = 0;
};

/// Residuals of 2 pi i dA/dtau = -D(A) and 2 pi i dB/dtau = -D(B), D the
/// Eisenstein combination of the delta_{2n}; derivative by central differences.
inline KzbOdeResiduals check_kzb_ode(const OdeContext<double>& ctx, int N) {
    Derivation<Cx> D = eisenstein_derivation(ctx.center().lattice(), N);
    KzbOdeResiduals r;
    CSeries la = detail::five_point(ctx, [N](const Engine<double>& e) { return assemble_A(e, N).series; });
    r.a_equation = (la + D(assemble_A(ctx.center(), N).series)).max_abs();
    CSeries lb = detail::five_point(ctx, [N](const Engine<double>& e) { return assemble_B(e, N).series; });
    r.b_equation = (lb + D(assemble_B(ctx.center(), N).series)).max_abs();
    return r;
}

struct LayerComparison {
    double max_difference = 0;  // over all words of weight <= N
    double max_residual = 0;    // largest kzb residual coefficient
    int words = 0;
};

/// Layer-by-layer comparison of the series equation for e^{i pi t} A with the
/// scalar differential system: the coefficient of b_{e_1} .. b_{e_n} in the
/// series residual should equal (-1)^n times the scalar residual of I_{e_n..e_1}.
inline LayerComparison compare_ode_layers(const OdeContext<double>& ctx, int N) {
    Derivation<Cx> D = eisenstein_derivation(ctx.center().lattice(), N);
    CSeries lm = detail::five_point(ctx, [N](const Engine<double>& e) { return dictionary_series(e, Kind::I, N); });
    CSeries res = lm + D(dictionary_series(ctx.center(), Kind::I, N));
    FElement<Cx> f = from_nc(res, 1e-7);
    LayerComparison out;
    for (const auto& w : words_up_to_weight(N)) {
        std::vector<int> rev(w.d.rbegin(), w.d.rend());
        Cx kz = f.coeff(rev);
        Cx scalar = ctx.residual(Kind::I, w) * ((w.depth() % 2) ? -1.0 : 1.0);
        out.max_difference = std::max(out.max_difference, std::abs(kz - scalar));
        out.max_residual = std::max(out.max_residual, std::abs(kz));
        ++out.words;
    }
    return out;
}

struct ModularResiduals {
    double a_identity = 0;
    double b_identity = 0;          // with Ad((-1/tau)^{-t})
    double b_identity_scalar = 0;   // conjugation by the scalar (-1/tau)^{-1}, i.e. none
};

/// alpha_tau: x -> -tau x, y -> -2 pi i x - y/tau.
inline CSeries alpha_tau(const CSeries& s, Cx tau) {
    const int N = s.trunc();
    CSeries X = CSeries::x(N), Y = CSeries::y(N);
    return substitute(s, X * (-tau), X * (-detail::kTwoPiI) - Y * (Cx(1) / tau));
}

/// Residuals of A(-1/tau) = Ad((-1/tau)^{-t}) alpha_tau(B^{-1}) and
/// B(-1/tau) = Ad((-1/tau)^{-t}) alpha_tau(B A B^{-1}), the power taken with
/// the principal logarithm (imaginary part in (0, pi)).
inline ModularResiduals check_modular_AB(const Engine<double>& at_tau, const Engine<double>& at_inv, int N) {
    const Cx tau = at_tau.lattice().tau();
    if (std::abs(at_inv.lattice().tau() + 1.0 / tau) > 1e-12 * std::abs(tau))
        throw ContractError("check_modular_AB: second engine must sit at -1/tau");
    CSeries A = assemble_A(at_tau, N).series, B = assemble_B(at_tau, N).series;
    CSeries Ai = assemble_A(at_inv, N).series, Bi = assemble_B(at_inv, N).series;
    CSeries t = t_series(N);
    Cx lg = std::log(-1.0 / tau);
    CSeries g = nc_exp(t * (-lg)), gi = nc_exp(t * lg);
    CSeries binv = nc_inverse(B);
    ModularResiduals r;
    r.a_identity = (g * alpha_tau(binv, tau) * gi - Ai).max_abs();
    CSeries bab = alpha_tau(B * A * binv, tau);
    r.b_identity = (g * bab * gi - Bi).max_abs();
    r.b_identity_scalar = (bab - Bi).max_abs();
    return r;
}

/// Renormalised holonomy of dG = -sum_d k_d(z) b_d G dz along [0, 1] with charge
/// t and regulator log(-2 pi i theta): an independent route to e^{i pi t} A.
inline CSeries holonomy_M(const Engine<double>& e, int N) {
    const auto& path = e.table(Kind::I).path;
    const auto& kf = e.kernels();
    const auto& lat = e.lattice();
    std::vector<CSeries> bs;
    for (int d = -1; d <= N - 2; ++d) bs.push_back(b_word<Cx>({d}, N));
    auto where = [](const PathPoint<double>& p) {
        bool near_start = p.t <= 0.5;
        return std::make_pair(near_start ? p.from_start : p.from_end, near_start ? 0 : 1);
    };
    RegForm<CSeries, double> omega{[&](const PathPoint<double>& p) {
                                       auto [u, m] = where(p);
                                       auto s = kf.sigma_shifted(u, m, 0);
                                       CSeries r(N);
                                       for (int d = -1; d <= N - 2; ++d) r -= bs[d + 1] * s.coeff(d);
                                       return r;
                                   },
                                   t_series(N)};
    Regulator<CSeries, double> reg{[&](const PathPoint<double>& p) {
                                       auto [u, m] = where(p);
                                       return log_theta_pinned(lat, u, m, 0);
                                   },
                                   [&](const PathPoint<double>& p) {
                                       auto [u, m] = where(p);
                                       return kf.sigma_shifted(u, m, 0).coeff(0);
                                   },
                                   t_series(N)};
    return renormalized_holonomy(path, omega, reg, N);
}

/// Asymptotic expansion at tau -> i infinity: D_0, D_m, h_m, A_infinity.
/// Operators on the truncated free algebra are dense matrices over the word
/// basis of length <= N.
class AsymptoticEngine {
public:
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;

    AsymptoticEngine(int N, int m_max) : N_(N), m_max_(m_max) {
        if (N < 1 || N > 8) throw ContractError("AsymptoticEngine: truncation must be in 1..8");
        if (m_max < 0) throw ContractError("AsymptoticEngine: m_max must be >= 0");
        words_.push_back("");
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (static_cast<int>(words_[i].size()) < N) {
                words_.push_back(words_[i] + "x");
                words_.push_back(words_[i] + "y");
            }
        for (std::size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<int>(i);
        const int W = static_cast<int>(words_.size());
        for (int n2 = -2; n2 + 2 <= N; n2 += 2) deltas_.push_back(matrix(to_complex(delta(n2, N).d)));

        const Cx c = -1.0 / detail::kTwoPiI;
        D_.assign(m_max + 1, Mat::Zero(W, W));
        D_[0] = c * deltas_[0];
        for (int k = 1; k < static_cast<int>(deltas_.size()); ++k) {
            int n = k - 1;  // delta_{2n}
            D_[0] += c * double(2 * n + 1) * 2.0 * std::riemann_zeta(2.0 * n + 2) * deltas_[k];
        }
        for (int m = 1; m <= m_max; ++m)
            for (int k = 1; k < static_cast<int>(deltas_.size()); ++k) {
                int n = k - 1;
                D_[m] += c * double(2 * n + 1) * g_coeff(2 * n + 2, m) * deltas_[k];
            }
        h_.assign(m_max + 1, Mat::Zero(W, W));
        h_[0] = Mat::Identity(W, W);
        for (int m = 1; m <= m_max; ++m) {
            Mat R = Mat::Zero(W, W);
            for (int mp = 1; mp <= m; ++mp) R += D_[mp] * h_[m - mp];
            // (2 pi i m - ad D0)^{-1} R = sum_k (ad D0)^k R / (2 pi i m)^{k+1}
            Cx s = detail::kTwoPiI * double(m), p = 1.0 / s;
            Mat cur = R, acc = Mat::Zero(W, W);
            for (int k = 0; k <= 2 * N + 2; ++k) {
                acc += p * cur;
                cur = D_[0] * cur - cur * D_[0];
                p /= s;
                if (cur.cwiseAbs().maxCoeff() == 0) break;
            }
            h_[m] = acc;
        }

        phi_ = kz_associator(N);
        ytilde_ = ytilde(N);
        CSeries t = t_series(N);
        CSeries phi_yt = associator_at(phi_, ytilde_, t);
        a_inf_ = phi_yt * nc_exp(ytilde_ * detail::kTwoPiI) * nc_inverse(phi_yt);
        m_series_.resize(m_max + 1);
        CSeries et = nc_exp(t * Cx(0, detail::kPi));
        for (int m = 0; m <= m_max; ++m) {
            m_series_[m] = et * A_layer(m);
            f_layers_.push_back(from_nc(m_series_[m], 1e-7 * (1 + m_series_[m].max_abs())));
        }
    }

    int trunc() const { return N_; }
    int m_max() const { return m_max_; }
    const std::vector<std::string>& basis() const { return words_; }
    const Mat& D(int m) const { return D_.at(m); }
    const Mat& h(int m) const { return h_.at(m); }
    const CSeries& associator() const { return phi_; }
    const CSeries& y_tilde() const { return ytilde_; }
    const CSeries& A_infinity() const { return a_inf_; }

    /// Matrix of a derivation on the word basis.
    Mat matrix(const Derivation<Cx>& d) const {
        const int W = static_cast<int>(words_.size());
        Mat M = Mat::Zero(W, W);
        for (int j = 0; j < W; ++j) {
            CSeries img = d(CSeries::word(N_, words_[j]));
            for (const auto& [w, c] : img.terms()) M(index_.at(w), j) = c;
        }
        return M;
    }
    Vec vec(const CSeries& s) const {
        Vec v = Vec::Zero(static_cast<int>(words_.size()));
        for (const auto& [w, c] : s.terms()) v(index_.at(w)) = c;
        return v;
    }
    CSeries series(const Vec& v) const {
        CSeries s(N_);
        for (int i = 0; i < v.size(); ++i)
            if (v(i) != Cx(0)) s.add(words_[i], v(i));
        return s;
    }

    /// h_m(A_infinity): coefficient of q^m in the expansion of A(tau).
    CSeries A_layer(int m) const { return series(h_.at(m) * vec(a_inf_)); }

    /// Sum_{m <= m_max} q^m h_m(A_infinity).
    CSeries A_predicted(Cx tau) const {
        Cx q = std::exp(detail::kTwoPiI * tau), qm = 1;
        CSeries s(N_);
        for (int m = 0; m <= m_max_; ++m, qm *= q) s += A_layer(m) * qm;
        return s;
    }

    /// B(tau) = e^{i pi t} Phi(-y~ - t, t) e^{2 pi i x} e^{2 pi i y~ tau} Phi(y~, t)^{-1}.
    CSeries B_underline(Cx tau) const {
        CSeries t = t_series(N_);
        CSeries left = associator_at(phi_, -ytilde_ - t, t);
        CSeries right = nc_inverse(associator_at(phi_, ytilde_, t));
        return nc_exp(t * Cx(0, detail::kPi)) * left * nc_exp(CSeries::x(N_) * detail::kTwoPiI) *
               nc_exp(ytilde_ * (detail::kTwoPiI * tau)) * right;
    }

    /// Predicted I_{d,n} for n <= m_max.
    std::vector<Cx> coefficients(const IndexWord& w) const {
        if (w.weight() > N_) throw TruncationError("asymptotic_coefficients: word weight exceeds truncation");
        std::vector<int> rev(w.d.rbegin(), w.d.rend());
        std::vector<Cx> out;
        for (int m = 0; m <= m_max_; ++m) {
            Cx c = f_layers_[m].coeff(rev);
            out.push_back((w.depth() % 2) ? -c : c);
        }
        return out;
    }

    /// Predicted J_d(tau) up to O(q): read off exp((2 pi i/tau) e+)(e^{-i pi t} B(tau)).
    Cx predicted_J0(const IndexWord& w, Cx tau) const {
        if (w.weight() > N_) throw TruncationError("predicted_J0: word weight exceeds truncation");
        CSeries t = t_series(N_);
        CSeries s = nc_exp(t * Cx(0, -detail::kPi)) * B_underline(tau);
        CSeries bt = apply_exp(to_complex(e_plus(N_).d), s, detail::kTwoPiI / tau);
        FElement<Cx> f = from_nc(bt, 1e-7 * (1 + bt.max_abs()));
        std::vector<int> rev(w.d.rbegin(), w.d.rend());
        Cx c = f.coeff(rev);
        return (w.depth() % 2) ? -c : c;
    }

    /// y~ = -(ad x / (e^{2 pi i ad x} - 1))(y) = -sum_k B_k (2 pi i)^{k-1}/k! ad_x^k(y).
    static CSeries ytilde(int N) {
        CSeries r(N);
        Cx c = 1.0 / detail::kTwoPiI;  // (2 pi i)^{k-1}/k! at k = 0
        for (int k = 0; k + 1 <= N; ++k) {
            if (k > 0) c *= detail::kTwoPiI / double(k);
            double bk = bernoulli(k);
            if (bk != 0) r -= to_complex(ad_x_pow_y<Rational>(k, N)) * (c * bk);
        }
        return r;
    }

private:
    static double bernoulli(int k) {
        if (k == 0) return 1;
        if (k == 1) return -0.5;
        if (k % 2) return 0;
        return boost::math::bernoulli_b2n<double>(k / 2);
    }
    /// Fourier coefficient g_{2k}(m), m >= 1, of G_{2k}.
    static Cx g_coeff(int two_k, int m) {
        if (two_k == 0) return 0;
        double sigma = 0;
        for (int d = 1; d <= m; ++d)
            if (m % d == 0) sigma += std::pow(double(d), two_k - 1);
        return 2.0 * std::pow(detail::kTwoPiI, two_k) / std::tgamma(double(two_k)) * sigma;
    }

    int N_, m_max_;
    std::vector<std::string> words_;
    std::map<std::string, int> index_;
    std::vector<Mat> deltas_, D_, h_;
    CSeries phi_, ytilde_, a_inf_;
    std::vector<CSeries> m_series_;
    std::vector<FElement<Cx>> f_layers_;
};

inline std::vector<Cx> asymptotic_coefficients(const AsymptoticEngine& e, const IndexWord& w) {
    return e.coefficients(w);
}

}  // namespace emzv
