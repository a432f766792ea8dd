#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "emzv/kzb.hpp"

using namespace emzv;

namespace {

const Engine<double>& engine_at(Cx tau) {
    static std::map<std::pair<double, double>, std::unique_ptr<Engine<double>>> pool;
    auto& slot = pool[{tau.real(), tau.imag()}];
    if (!slot) slot = std::make_unique<Engine<double>>(LatticeParam<double>(tau));
    return *slot;
}

const OdeContext<double>& ode_at_i() {
    static OdeContext<double> ctx(LatticeParam<double>(Cx(0, 1)), 1e-3);
    return ctx;
}

// int_0^1 (int_0^t ds/(1-s)) dt/t = int_0^1 -log(1-t)/t dt
double zeta2_oracle() {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([](double t) { return -std::log1p(-t) / t; }, 0.0, 1.0);
}

}  // namespace

TEST(Associator, GroupLikeAndLowDegree) {
    CSeries phi = kz_associator(6);
    EXPECT_LT(grouplike_defect(phi), 1e-9);
    EXPECT_LT(std::abs(phi.coeff("x")), 1e-10);
    EXPECT_LT(std::abs(phi.coeff("y")), 1e-10);
    EXPECT_LT(std::abs(phi.constant() - 1.0), 1e-15);
}

TEST(Associator, ZetaTwo) {
    CSeries phi = kz_associator(5);
    double oracle = zeta2_oracle();
    EXPECT_NEAR(oracle, M_PI * M_PI / 6, 1e-12);
    EXPECT_NEAR(std::abs(phi.coeff("xy")), oracle, 1e-8);
    // recorded sign: Phi = 1 - zeta(2) ab + zeta(2) ba + ...
    EXPECT_NEAR(phi.coeff("xy").real(), -oracle, 1e-8);
    EXPECT_NEAR(phi.coeff("yx").real(), oracle, 1e-8);
}

TEST(Associator, Duality) {
    const int N = 6;
    CSeries phi = kz_associator(N);
    CSeries swapped = substitute(phi, CSeries::y(N), CSeries::x(N));
    EXPECT_LT((phi * swapped - CSeries::one(N)).max_abs(), 1e-9);
}

TEST(Associator, ZetaThree) {
    CSeries phi = kz_associator(5);
    // weight-3 coefficient of a a b is zeta(3) up to sign
    EXPECT_NEAR(std::abs(phi.coeff("xxy")), std::riemann_zeta(3.0), 1e-9);
}

TEST(Kzb, DictionaryLowTerms) {
    const int N = 5;
    const auto& e = engine_at(Cx(0, 1));
    CSeries M = dictionary_series(e, Kind::I, N);
    EXPECT_EQ(M.constant(), Cx(1));
    EXPECT_NEAR(std::abs(M.coeff("y") + 1.0), 0, 1e-12);
    const auto& f = engine_at(Cx(0, 2));
    CSeries Jm = dictionary_series(f, Kind::J, N);
    EXPECT_NEAR(std::abs(Jm.coeff("y") + Cx(0, 2)), 0, 1e-10);
}

TEST(Kzb, AssembledSeriesAreGroupLike) {
    const int N = 5;
    const auto& e = engine_at(Cx(0, 1));
    EXPECT_LT(grouplike_defect(assemble_A(e, N).series), 1e-8);
    EXPECT_LT(grouplike_defect(assemble_B(e, N).series), 1e-8);
}

TEST(Kzb, HolonomyMatchesDictionary) {
    const int N = 4;
    const auto& e = engine_at(Cx(0.1, 1.0));
    CSeries hol = holonomy_M(e, N);
    CSeries dict = dictionary_series(e, Kind::I, N);
    EXPECT_LT((hol - dict).max_abs(), 1e-9);
}

TEST(Kzb, GroupRelations) {
    const int N = 5;
    for (Cx tau : {Cx(0, 1), Cx(0.3, 1.1)}) {
        const auto& e = engine_at(tau);
        auto r = check_group_relations(assemble_A(e, N), assemble_B(e, N));
        EXPECT_LT(r.a_relation, 1e-6) << tau;
        EXPECT_LT(r.b_relation, 1e-6) << tau;
        EXPECT_LT(r.commutator, 1e-6) << tau;
        EXPECT_LT(r.minus_identity_a, 1e-6) << tau;
        EXPECT_LT(r.minus_identity_b, 1e-6) << tau;
    }
}

TEST(Kzb, RelationsDetectCorruption) {
    const int N = 4;
    const auto& e = engine_at(Cx(0, 1));
    KzbSeries A = assemble_A(e, N), B = assemble_B(e, N);
    A.series.add("xy", Cx(1e-3));
    auto r = check_group_relations(A, B);
    EXPECT_GT(r.commutator, 1e-4);
}

TEST(Kzb, DifferentialEquations) {
    auto r = check_kzb_ode(ode_at_i(), 5);
    EXPECT_LT(r.a_equation, 1e-5);
    EXPECT_LT(r.b_equation, 1e-5);
}

TEST(Kzb, LayersMatchScalarSystem) {
    auto c = compare_ode_layers(ode_at_i(), 5);
    EXPECT_GT(c.words, 20);
    EXPECT_LT(c.max_difference, 1e-8);
}

TEST(Kzb, ModularIdentities) {
    const int N = 4;
    auto r = check_modular_AB(engine_at(Cx(0, 2)), engine_at(Cx(0, 0.5)), N);
    RecordProperty("a_identity", std::to_string(r.a_identity));
    RecordProperty("b_identity", std::to_string(r.b_identity));
    EXPECT_LT(r.a_identity, 1e-6);
    EXPECT_LT(r.b_identity, 1e-6);
}

TEST(Asymptotics, Structure) {
    AsymptoticEngine a(5, 2);
    const int W = static_cast<int>(a.basis().size());
    EXPECT_TRUE(a.h(0).isApprox(Eigen::MatrixXcd::Identity(W, W)));
    // y~ = -y/(2 pi i) + [x,y]/2 + ...
    CSeries yt = a.y_tilde();
    EXPECT_NEAR(std::abs(yt.coeff("y") + 1.0 / Cx(0, 2 * M_PI)), 0, 1e-15);
    EXPECT_NEAR(std::abs(yt.coeff("xy") - 0.5), 0, 1e-15);
    // A_infinity is fixed by e^{tau D0}
    Eigen::MatrixXcd D0 = a.D(0);
    Eigen::VectorXcd v = a.vec(a.A_infinity());
    EXPECT_LT((D0 * v).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT(grouplike_defect(a.A_infinity()), 1e-9);
}

TEST(Asymptotics, DepthOneHasNoCorrections) {
    AsymptoticEngine a(4, 3);
    for (int d = -1; d <= 2; ++d) {
        auto c = a.coefficients(IndexWord{d});
        for (std::size_t n = 1; n < c.size(); ++n) EXPECT_LT(std::abs(c[n]), 1e-8) << d << " " << n;
        EXPECT_NEAR(std::abs(c[0] - engine_at(Cx(0, 1)).value(Kind::I, IndexWord{d})), 0, 1e-9) << d;
    }
}

TEST(Asymptotics, MatchesValuesAtLargeImTau) {
    const int N = 4;
    AsymptoticEngine a(N, 3);
    for (double T : {2.0, 3.0}) {
        Cx tau(0, T);
        const auto& e = engine_at(tau);
        CSeries diff = a.A_predicted(tau) - assemble_A(e, N).series;
        EXPECT_LT(diff.max_abs(), 1e-11) << T;
    }
}

TEST(Asymptotics, DecayRate) {
    const int N = 4;
    AsymptoticEngine a(N, 2);
    const double target = std::exp(-2 * M_PI);
    int checked = 0;
    for (const auto& w : words_up_to_weight(N)) {
        auto c = a.coefficients(w);
        Cx d3 = engine_at(Cx(0, 3)).value(Kind::I, w) - c[0];
        Cx d4 = engine_at(Cx(0, 4)).value(Kind::I, w) - c[0];
        if (std::abs(c[1]) > 1e-6) {
            double ratio = std::abs(d4) / std::abs(d3);
            EXPECT_NEAR(ratio / target, 1.0, 0.2) << w.str();
            ++checked;
        } else {
            EXPECT_LT(std::abs(d3), 1e-8) << w.str();
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(Asymptotics, BUnderline) {
    const int N = 4;
    AsymptoticEngine a(N, 0);
    Cx tau(0, 3);
    CSeries diff = a.B_underline(tau) - assemble_B(engine_at(tau), N).series;
    RecordProperty("b_underline", std::to_string(diff.max_abs()));
    EXPECT_LT(diff.max_abs(), 1e-5);
    for (const auto& w : words_up_to_weight(3))
        EXPECT_NEAR(std::abs(a.predicted_J0(w, tau) - engine_at(tau).value(Kind::J, w)), 0, 1e-5) << w.str();
}
