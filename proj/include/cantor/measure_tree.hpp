#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/errors.hpp"

#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cantor {

// Exact finite restriction of a measure. Only nonzero values are stored; absent strings have mass 0.
class MeasureTree {
public:
    explicit MeasureTree(std::size_t depth = 0) : levels_(depth + 1) {}

    std::size_t depth() const { return levels_.size() - 1; }

    void set(const BitString& s, const Dyadic& v) {
        if (s.size() > depth()) throw DepthExceeded("set beyond tree depth: " + render_bits(s));
        auto& lvl = levels_[s.size()];
        if (v.is_zero()) lvl.erase(s);
        else lvl[s] = v;
    }

    // Same as set for nonzero v; fast when strings of a level arrive in lexicographic order.
    void append(const BitString& s, const Dyadic& v) {
        if (s.size() > depth()) throw DepthExceeded("set beyond tree depth: " + render_bits(s));
        if (v.is_zero()) return set(s, v);
        auto& lvl = levels_[s.size()];
        lvl.insert_or_assign(lvl.end(), s, v);
    }

    Dyadic get(const BitString& s) const {
        if (s.size() > depth()) throw DepthExceeded("query beyond tree depth: " + render_bits(s));
        const auto& lvl = levels_[s.size()];
        auto it = lvl.find(s);
        return it == lvl.end() ? Dyadic() : it->second;
    }

    // Nonzero entries of one level, in lexicographic order.
    const std::map<BitString, Dyadic>& level(std::size_t k) const { return levels_.at(k); }

    Dyadic level_max(std::size_t k) const {
        Dyadic m;
        for (const auto& [s, v] : levels_.at(k))
            if (v > m) m = v;
        return m;
    }

    std::size_t support_size() const {
        std::size_t n = 0;
        for (const auto& l : levels_) n += l.size();
        return n;
    }

    friend bool operator==(const MeasureTree& a, const MeasureTree& b) { return a.levels_ == b.levels_; }

private:
    std::vector<std::map<BitString, Dyadic>> levels_;
};

struct TreeReport {
    bool ok = true;
    std::optional<BitString> offender;
    std::string message;
    explicit operator bool() const { return ok; }
};

// Root mass 1, nonnegative values, exact additivity at every node above the leaf level.
inline TreeReport tree_validate(const MeasureTree& t) {
    auto fail = [](const BitString& s, std::string msg) { return TreeReport{false, s, std::move(msg)}; };
    if (t.get("") != Dyadic(1)) return fail("", "root mass is " + t.get("").str());
    for (std::size_t k = 0; k <= t.depth(); ++k) {
        const auto& lvl = t.level(k);
        for (const auto& [s, v] : lvl)
            if (v.sign() < 0) return fail(s, "negative value");
        if (k == t.depth()) break;
        // Children of one parent are adjacent in the next level, in the same order as their parents.
        const auto& next = t.level(k + 1);
        auto c = next.begin();
        for (const auto& [s, v] : lvl) {
            if (c != next.end() && c->first.compare(0, k, s) < 0) return fail(parent(c->first), "zero node has nonzero child");
            Dyadic sum;
            for (; c != next.end() && c->first.compare(0, k, s) == 0; ++c) sum += c->second;
            if (sum != v) return fail(s, "not additive");
        }
        if (c != next.end()) return fail(parent(c->first), "zero node has nonzero child");
    }
    return {};
}

inline MeasureTree tree_from_function(std::size_t depth, const std::function<Dyadic(const BitString&)>& mu) {
    MeasureTree t(depth);
    std::vector<BitString> frontier{""};
    for (std::size_t k = 0; k <= depth; ++k) {
        std::vector<BitString> next;
        for (const auto& s : frontier) {
            Dyadic v = mu(s);
            if (v.is_zero()) continue;
            t.set(s, v);
            if (k < depth) {
                next.push_back(s + "0");
                next.push_back(s + "1");
            }
        }
        frontier = std::move(next);
    }
    return t;
}

// Approximation oracle: approx(σ, i) lies within 2^-i of μ(σ).
struct MeasureOracle {
    std::function<Dyadic(const BitString&, std::uint64_t)> approx;
    bool exact = false;
    std::string name = "oracle";
    // Optional: max over |σ| = k of approx(σ, i).
    std::function<Dyadic(std::size_t, std::uint64_t)> level_max;
};

inline Dyadic cylinder_measure(const MeasureOracle& o, const BitString& s, std::uint64_t i) { return o.approx(s, i); }

enum class Extension { uniform_split, follow_zeros, error };

inline MeasureOracle oracle_from_tree(std::shared_ptr<const MeasureTree> t, Extension rule = Extension::error) {
    MeasureOracle o;
    o.exact = true;
    o.name = "tree";
    o.approx = [t, rule](const BitString& s, std::uint64_t) {
        std::size_t d = t->depth();
        if (s.size() <= d) return t->get(s);
        Dyadic base = t->get(s.substr(0, d));
        switch (rule) {
            case Extension::uniform_split: return base.shifted(s.size() - d);
            case Extension::follow_zeros:
                return s.find('1', d) == std::string::npos ? base : Dyadic();
            case Extension::error: break;
        }
        throw DepthExceeded("query beyond tree depth: " + render_bits(s));
    };
    o.level_max = [t, rule](std::size_t k, std::uint64_t) {
        std::size_t d = t->depth();
        if (k <= d) return t->level_max(k);
        if (rule == Extension::uniform_split) return t->level_max(d).shifted(k - d);
        if (rule == Extension::follow_zeros) return t->level_max(d);
        throw DepthExceeded("query beyond tree depth");
    };
    return o;
}

inline MeasureOracle oracle_from_tree(const MeasureTree& t, Extension rule = Extension::error) {
    return oracle_from_tree(std::make_shared<const MeasureTree>(t), rule);
}

// Materialize an exact oracle to a tree.
inline MeasureTree tree_from_oracle(const MeasureOracle& o, std::size_t depth, std::uint64_t precision = 0) {
    return tree_from_function(depth, [&](const BitString& s) { return o.approx(s, precision); });
}

namespace measures {

inline MeasureOracle lebesgue() {
    MeasureOracle o;
    o.exact = true;
    o.name = "lebesgue";
    o.approx = [](const BitString& s, std::uint64_t) { return Dyadic::pow2neg(s.size()); };
    o.level_max = [](std::size_t k, std::uint64_t) { return Dyadic::pow2neg(k); };
    return o;
}

// Point mass on the sequence whose bit at position k is bit(k).
inline MeasureOracle point_mass(std::function<char(std::size_t)> bit, std::string name = "point") {
    MeasureOracle o;
    o.exact = true;
    o.name = std::move(name);
    o.approx = [bit](const BitString& s, std::uint64_t) {
        for (std::size_t k = 0; k < s.size(); ++k)
            if (s[k] != bit(k)) return Dyadic();
        return Dyadic(1);
    };
    o.level_max = [](std::size_t, std::uint64_t) { return Dyadic(1); };
    return o;
}

inline MeasureOracle point_mass_zeros() {
    return point_mass([](std::size_t) { return '0'; }, "point:0");
}

// Product measure with P(bit = 1) = p.
inline MeasureOracle bernoulli(const Dyadic& p) {
    if (p.sign() < 0 || p > Dyadic(1)) throw std::invalid_argument("bernoulli: p outside [0,1]");
    MeasureOracle o;
    o.exact = true;
    o.name = "bernoulli:" + p.str();
    Dyadic q = Dyadic(1) - p;
    o.approx = [p, q](const BitString& s, std::uint64_t) {
        Dyadic v(1);
        for (char c : s) v = v * (c == '1' ? p : q);
        return v;
    };
    Dyadic hi = p > q ? p : q;
    o.level_max = [hi](std::size_t k, std::uint64_t) {
        Dyadic v(1);
        for (std::size_t j = 0; j < k; ++j) v = v * hi;
        return v;
    };
    return o;
}

}  // namespace measures

// measuretree v1 depth=<D>, then "<bits|-> <num>/2^<exp>" for nonzero nodes in shortlex order.
inline void write_tree(std::ostream& os, const MeasureTree& t) {
    os << "measuretree v1 depth=" << t.depth() << "\n";
    for (std::size_t k = 0; k <= t.depth(); ++k)
        for (const auto& [s, v] : t.level(k)) os << render_bits(s) << " " << v.str() << "\n";
}

inline std::string tree_to_string(const MeasureTree& t) {
    std::ostringstream os;
    write_tree(os, t);
    return os.str();
}

inline MeasureTree read_tree(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError("measuretree: empty input");
    const std::string head = "measuretree v1 depth=";
    if (line.rfind(head, 0) != 0) throw ParseError("measuretree: bad header: " + line);
    std::string ds = line.substr(head.size());
    if (ds.empty() || ds.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("measuretree: bad depth: " + ds);
    MeasureTree t(std::stoull(ds));
    std::size_t lineno = 1;
    std::optional<BitString> prev;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string bits, val, extra;
        if (!(ls >> bits >> val) || (ls >> extra))
            throw ParseError("measuretree: line " + std::to_string(lineno) + " malformed");
        try {
            BitString s = parse_bits(bits);
            if (prev && !shortlex_less(*prev, s))
                throw ParseError("measuretree: line " + std::to_string(lineno) + " out of order");
            prev = s;
            t.set(s, Dyadic::parse(val));
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError("measuretree: line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return t;
}

inline MeasureTree tree_from_string(const std::string& s) {
    std::istringstream is(s);
    return read_tree(is);
}

}  // namespace cantor
