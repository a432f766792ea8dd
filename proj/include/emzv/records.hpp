#pragma once

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "word.hpp"

namespace emzv {

inline constexpr const char* kToolVersion = "0.1.0";

/// One computed or checked quantity, as exported and cached.
struct ResultRecord {
    std::string kind;  // I, J, check, asymptotic
    std::vector<int> word;
    std::complex<double> tau;
    std::complex<double> value;
    double est_error = 0;
    std::map<std::string, std::string> meta;

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// 17 significant digits; reads back to the same double.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline nlohmann::json num(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

inline double num(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    throw ContractError("record: bad number " + s);
}

}  // namespace detail

inline nlohmann::json to_json(const ResultRecord& r) {
    using nlohmann::json;
    return json{{"kind", r.kind},
                {"word", r.word},
                {"tau", {{"re", detail::num(r.tau.real())}, {"im", detail::num(r.tau.imag())}}},
                {"value", {{"re", detail::num(r.value.real())}, {"im", detail::num(r.value.imag())}}},
                {"est_error", detail::num(r.est_error)},
                {"meta", r.meta}};
}

inline ResultRecord record_from_json(const nlohmann::json& j) {
    try {
        ResultRecord r;
        r.kind = j.at("kind").get<std::string>();
        r.word = j.at("word").get<std::vector<int>>();
        r.tau = {detail::num(j.at("tau").at("re")), detail::num(j.at("tau").at("im"))};
        r.value = {detail::num(j.at("value").at("re")), detail::num(j.at("value").at("im"))};
        r.est_error = detail::num(j.at("est_error"));
        r.meta = j.at("meta").get<std::map<std::string, std::string>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("record: ") + e.what());
    }
}

inline std::string records_to_json(const std::vector<ResultRecord>& rs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& r : rs) a.push_back(to_json(r));
    return a.dump(2) + "\n";
}

inline std::vector<ResultRecord> records_from_json(const std::string& text) {
    nlohmann::json a;
    try {
        a = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("records: ") + e.what());
    }
    if (!a.is_array()) throw ContractError("records: expected a JSON array");
    std::vector<ResultRecord> out;
    for (const auto& j : a) out.push_back(record_from_json(j));
    return out;
}

inline std::string records_to_csv(const std::vector<ResultRecord>& rs) {
    std::string s = "kind,word,tau_re,tau_im,value_re,value_im,est_error\n";
    for (const auto& r : rs) {
        std::string w;
        for (std::size_t i = 0; i < r.word.size(); ++i) w += (i ? " " : "") + std::to_string(r.word[i]);
        s += r.kind + "," + w + "," + fmt17(r.tau.real()) + "," + fmt17(r.tau.imag()) + "," + fmt17(r.value.real()) +
             "," + fmt17(r.value.imag()) + "," + fmt17(r.est_error) + "\n";
    }
    return s;
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// File-per-record cache.  Each file stores the key, the record and a
/// checksum of the record; a mismatch is reported through `warn` and treated
/// as a miss.  Writes go through a temporary file and are serialised.
class ResultCache {
public:
    using Warn = std::function<void(const std::string&)>;

    explicit ResultCache(std::filesystem::path dir, Warn warn = {}) : dir_(std::move(dir)), warn_(std::move(warn)) {}

    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path path_for(const std::string& key) const { return dir_ / (hex64(fnv1a(key)) + ".json"); }

    std::optional<ResultRecord> get(const std::string& key) const {
        auto p = path_for(key);
        std::ifstream in(p);
        if (!in) return std::nullopt;
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            auto j = nlohmann::json::parse(ss.str());
            if (j.at("key").get<std::string>() != key) return std::nullopt;
            const auto& rec = j.at("record");
            if (j.at("checksum").get<std::string>() != hex64(fnv1a(rec.dump()))) {
                warn("cache entry " + p.string() + " failed its checksum; recomputing");
                return std::nullopt;
            }
            return record_from_json(rec);
        } catch (const std::exception&) {
            warn("cache entry " + p.string() + " is unreadable; recomputing");
            return std::nullopt;
        }
    }

    void put(const std::string& key, const ResultRecord& r) {
        std::lock_guard<std::mutex> lock(mu_);
        std::filesystem::create_directories(dir_);
        nlohmann::json rec = to_json(r);
        nlohmann::json j{{"key", key}, {"record", rec}, {"checksum", hex64(fnv1a(rec.dump()))}};
        auto p = path_for(key);
        auto tmp = p;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw Error("cache: cannot write " + tmp.string());
            out << j.dump() << "\n";
        }
        std::filesystem::rename(tmp, p);
    }

private:
    void warn(const std::string& m) const {
        if (warn_) warn_(m);
    }

    std::filesystem::path dir_;
    Warn warn_;
    std::mutex mu_;
};

}  // namespace emzv
