#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "emzv/suites.hpp"

using namespace emzv;

namespace {

struct Criterion {
    std::string id;
    std::string title;
    double time_limit;  // seconds, 0 for none
    std::function<std::vector<CheckResult>()> run;
};

}  // namespace

int main() {
    const Tolerances tol;
    const Cx i1(0, 1), i2(0, 2);
    std::unique_ptr<Engine<double>> at_i, at_2i;
    std::unique_ptr<OdeContext<double>> ode;
    auto ctx = [&]() -> const OdeContext<double>& {
        if (!ode) ode = std::make_unique<OdeContext<double>>(LatticeParam<double>(i1), 1e-3);
        return *ode;
    };

    std::vector<Criterion> criteria{
        {"AC1", "special values", 10,
         [&] {
             at_i = std::make_unique<Engine<double>>(LatticeParam<double>(i1));
             at_2i = std::make_unique<Engine<double>>(LatticeParam<double>(i2));
             CheckResult ri{"I_(-1)^n(i) = 1/n!", "special value of I", 0, 1e-10, "n <= 4"};
             CheckResult rj{"J_(-1)^n(2i) = (2i)^n/n!", "special value of J", 0, 1e-9, "n <= 4"};
             double fact = 1;
             for (int n = 1; n <= 4; ++n) {
                 fact *= n;
                 IndexWord w(std::vector<int>(n, -1));
                 ri.residual = std::max(ri.residual, std::abs(at_i->value(Kind::I, w) - 1.0 / fact));
                 rj.residual = std::max(rj.residual, std::abs(at_2i->value(Kind::J, w) - std::pow(i2, n) / fact));
             }
             return std::vector<CheckResult>{ri, rj};
         }},
        {"AC2", "shuffle suite, weight <= 6, tau = i", 120,
         [&] { return shuffle_suite(ctx().center(), 6, tol.shuffle); }},
        {"AC3", "reversal suite, weight <= 6, tau = i", 0,
         [&] { return reversal_suite(ctx().center(), 6, tol.reversal); }},
        {"AC4", "modular transform, n <= 2, D_max = 3, tau in {i, 2i}", 0,
         [&] {
             Engine<double> half(LatticeParam<double>(Cx(0, 0.5)));
             auto a = modular_suite(ctx().center(), ctx().center(), 2, 3, tol.modular);
             auto b = modular_suite(*at_2i, half, 2, 3, tol.modular);
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {"AC5", "differential system, weight <= 5, tau = i, step 1e-3", 0,
         [&] { return ode_suite(ctx(), 5, tol.ode); }},
        {"AC6", "exact algebra suite", 60, [] { return algebra_suite(); }},
        {"AC7", "KZB relations, N = 5, tau = i", 0, [&] { return kzb_suite(ctx(), 5, tol); }},
        {"AC8", "special-function suite, tau in {i, 0.3+1.1i}", 0,
         [&] {
             auto a = special_function_suite(i1, tol);
             auto b = special_function_suite(Cx(0.3, 1.1), tol);
             a.insert(a.end(), b.begin(), b.end());
             return a;
         }},
        {"AC9", "asymptotics at i infinity, weight <= 4, T = 3 vs 4", 300, [&] { return asymptotic_suite(tol); }},
        {"AC10", "KZ associator, weight <= 5", 0, [&] { return associator_suite(tol, 5); }},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        std::vector<CheckResult> res;
        std::string error;
        try {
            res = c.run();
        } catch (const std::exception& ex) {
            error = ex.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool ok = error.empty() && !res.empty() && (c.time_limit == 0 || secs < c.time_limit);
        for (const auto& r : res) ok = ok && r.passed();
        if (!ok) ++failed;
        std::string limit = c.time_limit > 0 ? " (limit " + std::to_string(int(c.time_limit)) + " s)" : "";
        std::printf("%s %s  %s  [%.1f s%s]\n", c.id.c_str(), ok ? "PASS" : "FAIL", c.title.c_str(), secs,
                    limit.c_str());
        if (!error.empty()) std::printf("    error: %s\n", error.c_str());
        for (const auto& r : res)
            std::printf("    %-4s %-26s residual %.3e  tol %.1e  %s\n", r.passed() ? "ok" : "BAD", r.name.c_str(),
                        r.residual, r.tolerance, r.detail.c_str());
    }
    std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
