#pragma once

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "records.hpp"
#include "suites.hpp"

namespace emzv::cli {

enum ExitCode { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumeric = 3 };

struct RunConfig {
    Cx tau{0, 1};
    int max_depth = 8;
    int max_weight = 10;
    std::optional<int> suite_weight;  // --max-weight as given
    int depth = 2;                    // modular suite
    int d_max = 3;
    int trunc = 5;                    // kzb truncation and associator weight
    int layers = 2;                   // asymptotic layers in compute
    std::optional<double> tolerance;
    double q_tolerance = 1e-16;
    std::string format;
    std::filesystem::path cache_dir;
    bool use_cache = true;
    int jobs = 1;

    Settings settings() const {
        Settings s;
        s.max_depth = max_depth;
        s.max_weight = max_weight;
        s.q_tolerance = q_tolerance;
        return s;
    }
};

/// "a+bi", "a-bi", "bi", "i" with decimal literals.
inline Cx parse_tau(const std::string& text) {
    static const std::string num = R"((?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)";
    static const std::regex full("^\\s*([+-]?" + num + ")\\s*([+-])\\s*(" + num + ")?\\s*i\\s*$");
    static const std::regex imag("^\\s*([+-]?" + num + ")?\\s*i\\s*$");
    std::smatch m;
    if (std::regex_match(text, m, full)) {
        double im = m[3].matched ? std::stod(m[3].str()) : 1.0;
        return {std::stod(m[1].str()), m[2].str() == "-" ? -im : im};
    }
    if (std::regex_match(text, m, imag)) {
        std::string c = m[1].matched ? m[1].str() : "1";
        if (c == "+" || c == "-") c += "1";
        return {0.0, std::stod(c)};
    }
    throw ContractError("bad tau '" + text + "', expected a+bi");
}

/// Explicit words plus all words with weight in "LO:HI" (or "W"), depth
/// capped; sorted by weight, depth, then entries, without duplicates.
inline std::vector<IndexWord> select_words(const std::vector<std::string>& specs, const std::string& weights,
                                           int max_depth) {
    std::set<IndexWord> out;
    for (const auto& s : specs) {
        IndexWord w = parse_word(s);
        if (!w.empty()) out.insert(w);
    }
    if (!weights.empty()) {
        static const std::regex range(R"(^\s*([0-9]+)\s*(?::\s*([0-9]+))?\s*$)");
        std::smatch m;
        if (!std::regex_match(weights, m, range)) throw ContractError("bad weight range '" + weights + "'");
        int lo = std::stoi(m[1].str()), hi = m[2].matched ? std::stoi(m[2].str()) : lo;
        if (lo < 1 || hi < lo) throw ContractError("bad weight range '" + weights + "'");
        for (int w = lo; w <= hi; ++w)
            for (auto& v : words_of_weight(w))
                if (v.depth() <= max_depth) out.insert(v);
    }
    return {out.begin(), out.end()};
}

inline std::map<std::string, std::string> base_meta(const RunConfig& c) {
    return {{"max_depth", std::to_string(c.max_depth)},
            {"max_weight", std::to_string(c.max_weight)},
            {"q_tolerance", fmt17(c.q_tolerance)},
            {"version", kToolVersion}};
}

inline std::string cache_key(const RunConfig& c, Kind k, const IndexWord& w) {
    Settings s = c.settings();
    return std::string(kind_name(k)) + "|" + w.str() + "|" + fmt17(c.tau.real()) + "|" + fmt17(c.tau.imag()) + "|" +
           std::to_string(s.max_depth) + "|" + std::to_string(s.max_weight) + "|" + fmt17(s.q_tolerance) + "|" +
           std::to_string(s.gl_nodes) + "|" + kToolVersion;
}

/// I or J values; cached records are reused, the rest computed on `jobs`
/// threads sharing one engine.
inline std::vector<ResultRecord> compute_values(const RunConfig& c, Kind kind, const std::vector<IndexWord>& words,
                                                ResultCache* cache) {
    std::vector<ResultRecord> out(words.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < words.size(); ++i) {
        auto hit = cache ? cache->get(cache_key(c, kind, words[i])) : std::nullopt;
        if (hit)
            out[i] = *hit;
        else
            todo.push_back(i);
    }
    if (todo.empty()) return out;
    Engine<double> engine(LatticeParam<double>(c.tau, c.settings()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    auto worker = [&] {
        for (std::size_t k; (k = next++) < todo.size();) {
            std::size_t i = todo[k];
            try {
                auto v = engine.compute(kind, words[i]);
                ResultRecord r{kind_name(kind), words[i].d, c.tau, v.value, v.est_error, base_meta(c)};
                if (cache) cache->put(cache_key(c, kind, words[i]), r);
                out[i] = r;
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mu);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(c.jobs, static_cast<int>(todo.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

/// Coefficients I_{d,m}, m = 0..layers, of the expansion at i infinity.
inline std::vector<ResultRecord> compute_asymptotic(const RunConfig& c, const std::vector<IndexWord>& words) {
    if (words.empty()) return {};
    int N = 1;
    for (const auto& w : words) N = std::max(N, w.weight());
    if (N > 8) throw TruncationError("asymptotic coefficients are available up to weight 8");
    AsymptoticEngine a(N, c.layers);
    std::vector<ResultRecord> out;
    for (const auto& w : words) {
        auto cs = a.coefficients(w);
        for (int m = 0; m <= c.layers; ++m) {
            auto meta = base_meta(c);
            meta["layer"] = std::to_string(m);
            out.push_back({"asymptotic", w.d, Cx(0, 0), cs[m], 0.0, meta});
        }
    }
    return out;
}

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> v{"shuffle", "reversal", "modular",  "ode",        "kzb",
                                            "asymptotic", "special", "algebra", "associator", "all"};
    return v;
}

inline std::vector<CheckResult> run_suite(const RunConfig& c, const std::string& suite) {
    Tolerances tol;
    std::unique_ptr<OdeContext<double>> ctx;
    std::unique_ptr<Engine<double>> inv;
    const Settings s = c.settings();
    auto context = [&]() -> const OdeContext<double>& {
        if (!ctx) ctx = std::make_unique<OdeContext<double>>(LatticeParam<double>(c.tau, s), s.ode_step);
        return *ctx;
    };
    auto inverse = [&]() -> const Engine<double>& {
        if (!inv) inv = std::make_unique<Engine<double>>(LatticeParam<double>(-1.0 / c.tau, s));
        return *inv;
    };
    auto pick = [&](double d) { return c.tolerance ? *c.tolerance : d; };
    auto weight = [&](int d) { return c.suite_weight ? *c.suite_weight : d; };
    std::vector<CheckResult> out;
    auto add = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
    const bool all = suite == "all";
    if (all || suite == "shuffle") add(shuffle_suite(context().center(), weight(6), pick(tol.shuffle)));
    if (all || suite == "reversal") add(reversal_suite(context().center(), weight(6), pick(tol.reversal)));
    if (all || suite == "modular") add(modular_suite(context().center(), inverse(), c.depth, c.d_max, pick(tol.modular)));
    if (all || suite == "ode") add(ode_suite(context(), weight(5), pick(tol.ode)));
    if (c.tolerance) {
        tol.kzb_relations = tol.kzb_ode = tol.kzb_layers = *c.tolerance;
        tol.decay_ratio = tol.flat_words = tol.depth_one = *c.tolerance;
        tol.special = tol.special_fd = *c.tolerance;
        tol.grouplike = tol.degree_one = tol.zeta_two = *c.tolerance;
    }
    if (all || suite == "kzb") add(kzb_suite(context(), c.trunc, tol, &inverse()));
    if (all || suite == "asymptotic") add(asymptotic_suite(tol, std::min(weight(4), 8), 3, 4, s));
    if (all || suite == "special") add(special_function_suite(c.tau, tol));
    if (all || suite == "algebra") add(algebra_suite());
    if (all || suite == "associator") add(associator_suite(tol, c.trunc));
    return out;
}

inline std::vector<ResultRecord> check_records(const RunConfig& c, const std::vector<CheckResult>& rs) {
    std::vector<ResultRecord> out;
    for (const auto& r : rs) {
        auto meta = base_meta(c);
        meta["name"] = r.name;
        meta["identity"] = r.identity;
        meta["detail"] = r.detail;
        meta["passed"] = r.passed() ? "true" : "false";
        out.push_back({"check", {}, c.tau, Cx(r.residual, 0), r.tolerance, meta});
    }
    return out;
}

inline std::string check_report(const std::vector<CheckResult>& rs) {
    std::string s;
    int failed = 0;
    char buf[512];
    for (const auto& r : rs) {
        failed += !r.passed();
        std::snprintf(buf, sizeof buf, "%s  %-24s residual %.3e  tol %.1e  %s; %s\n", r.passed() ? "PASS" : "FAIL",
                      r.name.c_str(), r.residual, r.tolerance, r.identity.c_str(), r.detail.c_str());
        s += buf;
    }
    s += std::to_string(rs.size() - failed) + " of " + std::to_string(rs.size()) + " checks passed\n";
    return s;
}

inline std::string render(const std::vector<ResultRecord>& rs, const std::string& format) {
    return format == "csv" ? records_to_csv(rs) : records_to_json(rs);
}

inline std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("EMZV_CACHE_DIR"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "emzv";
    return ".emzv-cache";
}

/// Entry point of the command-line tool; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Elliptic multiple zeta values: compute, check identities, export tables."};
    app.require_subcommand(1);
    RunConfig c;
    std::string tau_text = "0+1i", kind_text, weights, suite, output, cache_dir;
    std::vector<std::string> word_specs;
    bool no_cache = false;
    int max_weight = 10;

    auto common = [&](CLI::App* s) {
        s->add_option("--tau", tau_text, "modulus a+bi, Im > 0")->capture_default_str();
        s->add_option("--max-depth", c.max_depth, "depth cap")->check(CLI::Range(1, 8))->capture_default_str();
        s->add_option("--max-weight", max_weight, "weight cap; for check, the suite weight")->check(CLI::Range(1, 10));
        s->add_option("--q-tolerance", c.q_tolerance, "q-series truncation threshold")
            ->check(CLI::Range(1e-30, 1e-3))
            ->capture_default_str();
        s->add_option("--cache-dir", cache_dir, "cache directory (default $EMZV_CACHE_DIR or ~/.cache/emzv)");
        s->add_flag("--no-cache", no_cache, "neither read nor write the cache");
        s->add_option("--jobs", c.jobs, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    };
    auto selection = [&](CLI::App* s) {
        s->add_option("--kind", kind_text, "I, J or asymptotic")->check(CLI::IsMember({"I", "J", "asymptotic"}));
        s->add_option("--word", word_specs, "comma-separated indices, repeatable");
        s->add_option("--weights", weights, "all words with weight in LO:HI");
        s->add_option("--layers", c.layers, "q-layers for asymptotic")->check(CLI::Range(0, 6))->capture_default_str();
    };
    auto suite_opts = [&](CLI::App* s) {
        s->add_option("--depth", c.depth, "depth for the modular suite")->check(CLI::Range(1, 4))->capture_default_str();
        s->add_option("--dmax", c.d_max, "largest index for the modular suite")
            ->check(CLI::Range(-1, 8))
            ->capture_default_str();
        s->add_option("--trunc", c.trunc, "series truncation for kzb and associator")
            ->check(CLI::Range(1, 8))
            ->capture_default_str();
        s->add_option("--tolerance", c.tolerance, "override every pass threshold of the suite");
    };

    auto* compute = app.add_subcommand("compute", "compute I or J values");
    common(compute);
    selection(compute);
    compute->get_option("--kind")->required();
    std::string compute_format = "json";
    compute->add_option("--format", compute_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* check = app.add_subcommand("check", "run an identity suite");
    common(check);
    suite_opts(check);
    check->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
    std::string check_format = "text";
    check->add_option("--format", check_format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));

    auto* exp = app.add_subcommand("export", "write values or a check report to a file");
    common(exp);
    selection(exp);
    suite_opts(exp);
    exp->add_option("--suite", suite, "export a check report instead of values")->check(CLI::IsMember(suite_names()));
    exp->add_option("--output", output, "destination file")->required();
    std::string export_format = "json";
    exp->add_option("--format", export_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kPass : kUsage;
    }

    try {
        c.tau = parse_tau(tau_text);
        if (!(c.tau.imag() > 0)) throw ContractError("tau must have positive imaginary part");
        c.max_weight = max_weight;
        for (auto* s : {compute, check, exp})
            if (s->parsed() && s->count("--max-weight")) c.suite_weight = max_weight;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    if (exp->parsed() && suite.empty() == kind_text.empty()) {
        err << "error: export needs exactly one of --kind and --suite\n";
        return kUsage;
    }
    c.cache_dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
    c.use_cache = !no_cache;
    ResultCache cache(c.cache_dir, [&err](const std::string& m) { err << "warning: " << m << "\n"; });

    try {
        auto values = [&]() {
            auto words = select_words(word_specs, weights, c.max_depth);
            if (kind_text == "asymptotic") return compute_asymptotic(c, words);
            return compute_values(c, kind_text == "I" ? Kind::I : Kind::J, words, c.use_cache ? &cache : nullptr);
        };
        if (compute->parsed()) {
            out << render(values(), compute_format);
            return kPass;
        }
        if (check->parsed()) {
            auto rs = run_suite(c, suite);
            if (check_format == "text")
                out << check_report(rs);
            else
                out << render(check_records(c, rs), check_format);
            for (const auto& r : rs)
                if (!r.passed()) return kCheckFailed;
            return kPass;
        }
        std::vector<ResultRecord> rs;
        bool failed = false;
        if (!suite.empty()) {
            auto checks = run_suite(c, suite);
            for (const auto& r : checks) failed = failed || !r.passed();
            rs = check_records(c, checks);
        } else {
            rs = values();
        }
        std::ofstream f(output, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << output << "\n";
            return kUsage;
        }
        f << render(rs, export_format);
        if (!f) {
            err << "error: write to " << output << " failed\n";
            return kUsage;
        }
        return failed ? kCheckFailed : kPass;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const TruncationError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const SingularPointError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kNumeric;
    }
}

}  // namespace emzv::cli
