#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "errors.hpp"

namespace emzv {

enum class Kind { I, J };

inline const char* kind_name(Kind k) { return k == Kind::I ? "I" : "J"; }

/// Index word (d_1, ..., d_n), d_i >= -1.  Weight is sum (d_i + 2).
struct IndexWord {
    std::vector<int> d;

    IndexWord() = default;
    IndexWord(std::initializer_list<int> l) : d(l) { validate(); }
    explicit IndexWord(std::vector<int> v) : d(std::move(v)) { validate(); }

    int depth() const { return static_cast<int>(d.size()); }
    int weight() const {
        int w = 0;
        for (int x : d) w += x + 2;
        return w;
    }
    int sum() const {
        int s = 0;
        for (int x : d) s += x;
        return s;
    }
    bool empty() const { return d.empty(); }
    bool all_zero() const {
        return std::all_of(d.begin(), d.end(), [](int x) { return x == 0; });
    }
    IndexWord slice(std::size_t from, std::size_t to) const {
        return IndexWord(std::vector<int>(d.begin() + from, d.begin() + to));
    }
    IndexWord reversed() const { return IndexWord(std::vector<int>(d.rbegin(), d.rend())); }
    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
        return s;
    }
    void validate() const {
        for (int x : d)
            if (x < -1) throw ContractError("IndexWord: entries must be >= -1");
    }

    friend bool operator==(const IndexWord&, const IndexWord&) = default;
    /// Canonical order: weight, then depth, then lexicographic.
    friend bool operator<(const IndexWord& a, const IndexWord& b) {
        if (a.weight() != b.weight()) return a.weight() < b.weight();
        if (a.depth() != b.depth()) return a.depth() < b.depth();
        return a.d < b.d;
    }
};

/// All words of the given weight (compositions into parts d_i + 2 >= 1),
/// in canonical order.
inline std::vector<IndexWord> words_of_weight(int w) {
    std::vector<IndexWord> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int left) -> void {
        if (left == 0) {
            out.emplace_back(cur);
            return;
        }
        for (int part = 1; part <= left; ++part) {
            cur.push_back(part - 2);
            self(self, left - part);
            cur.pop_back();
        }
    };
    if (w > 0) rec(rec, w);
    std::sort(out.begin(), out.end());
    return out;
}

/// All nonempty words of weight 1..max_weight.
inline std::vector<IndexWord> words_up_to_weight(int max_weight) {
    std::vector<IndexWord> out;
    for (int w = 1; w <= max_weight; ++w) {
        auto v = words_of_weight(w);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

/// Parse "d1,d2,..." (empty string gives the empty word).
inline IndexWord parse_word(const std::string& s) {
    std::vector<int> v;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            std::size_t used = 0;
            int x = std::stoi(tok, &used);
            if (used != tok.size()) throw ContractError("bad word entry: " + tok);
            v.push_back(x);
        } catch (const std::logic_error&) {
            throw ContractError("bad word entry: " + tok);
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return IndexWord(v);
}

}  // namespace emzv
