#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/errors.hpp"
#include "cantor/measure_tree.hpp"
#include "cantor/orders.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cantor {

inline constexpr std::uint64_t kFinalStage = std::numeric_limits<std::uint64_t>::max();

// Cantor pairing <k,s> = (k+s)(k+s+1)/2 + s.
inline std::uint64_t pair_code(std::uint64_t k, std::uint64_t s) { return (k + s) * (k + s + 1) / 2 + s; }

inline std::pair<std::uint64_t, std::uint64_t> unpair_code(std::uint64_t c) {
    std::uint64_t d = boost::multiprecision::sqrt(BigInt(8) * c + 1).convert_to<std::uint64_t>();
    d = (d - 1) / 2;
    std::uint64_t s = c - d * (d + 1) / 2;
    return {d - s, s};
}

// Least level l <= depth with every cylinder of length l below 2^-n.
inline std::uint64_t granularity_exact(const MeasureTree& t, std::uint64_t n) {
    Dyadic bound = Dyadic::pow2neg(n);
    for (std::size_t l = 0; l <= t.depth(); ++l)
        if (t.level_max(l) < bound) return l;
    throw NotFound("granularity not found within depth " + std::to_string(t.depth()));
}

namespace detail {

inline Dyadic level_max(const MeasureOracle& o, std::size_t k, std::uint64_t s, const Dyadic* stop_at = nullptr) {
    if (o.level_max) return o.level_max(k, s);
    if (k >= 40) throw BudgetExhausted("level enumeration too large at length " + std::to_string(k));
    Dyadic m;
    for (std::uint64_t x = 0; x < (std::uint64_t{1} << k); ++x) {
        Dyadic v = o.approx(nth_string(x, k), s);
        if (v > m) {
            m = v;
            if (stop_at && !(m < *stop_at)) return m;
        }
    }
    return m;
}

}  // namespace detail

struct SandwichResult {
    std::uint64_t k = 0;
    std::uint64_t s = 0;
    std::uint64_t code = 0;
};

// First <k,s> in pairing order with max_σ μ_s(σ) + 2^-s < 2^-n and max_σ μ_s(σ) - 2^-s > 2^-(n+2) over |σ| = k.
// Stage s is read as oracle precision s. Then g(n) <= k < g(n+2).
inline SandwichResult granularity_sandwich_search(const MeasureOracle& o, std::uint64_t n, std::uint64_t budget) {
    Dyadic hi = Dyadic::pow2neg(n);
    Dyadic lo = Dyadic::pow2neg(n + 2);
    for (std::uint64_t c = 0; c < budget; ++c) {
        auto [k, s] = unpair_code(c);
        Dyadic slack = Dyadic::pow2neg(s);
        if (!(slack < hi)) continue;
        Dyadic cap = hi - slack;
        Dyadic m = detail::level_max(o, k, s, &cap);
        if (m < cap && m - slack > lo) return {k, s, c};
    }
    throw BudgetExhausted("granularity sandwich: budget exhausted at n=" + std::to_string(n));
}

inline std::uint64_t granularity_sandwich(const MeasureOracle& o, std::uint64_t n, std::uint64_t budget) {
    return granularity_sandwich_search(o, n, budget).k;
}

// Decides μ(σ) < 2^-n: exact oracles directly, otherwise at precision n+guard escalated up to budget extra bits.
inline bool measure_below(const MeasureOracle& o, const BitString& s, std::uint64_t n, std::uint64_t guard = 4,
                          std::uint64_t budget = 64) {
    Dyadic bound = Dyadic::pow2neg(n);
    if (o.exact) return o.approx(s, n + guard) < bound;
    for (std::uint64_t i = n + guard; i <= n + guard + budget; ++i) {
        Dyadic a = o.approx(s, i);
        Dyadic err = Dyadic::pow2neg(i);
        if (a + err < bound) return true;
        if (!(a - err < bound)) return false;
    }
    throw BudgetExhausted("precision escalation exhausted at " + render_bits(s));
}

// min{k : μ(X↾k) < 2^-n}
inline std::uint64_t local_granularity(const MeasureOracle& o, const BitString& X, std::uint64_t n) {
    for (std::size_t k = 0; k <= X.size(); ++k)
        if (measure_below(o, X.substr(0, k), n)) return k;
    throw DepthExceeded("prefix too short for local granularity at n=" + std::to_string(n));
}

inline bool local_granularity_bound_check(const MeasureOracle& o, const BitString& X, const Order& f, std::uint64_t d,
                                          std::uint64_t N) {
    for (std::uint64_t n = 0; n <= N; ++n)
        if (f(n + d) < local_granularity(o, X, n)) return false;
    return true;
}

using TreePredicate = std::function<bool(const BitString&)>;

// ν(σ) = μ(σ) if σ or σ⁻ lies in T, else ν(σ⁻)/2.
inline MeasureOracle remove_atoms(MeasureOracle mu, TreePredicate T) {
    if (!T("")) throw InvariantViolation("remove_atoms: tree must contain the empty string");
    MeasureOracle nu;
    nu.exact = mu.exact;
    nu.name = "remove_atoms(" + mu.name + ")";
    nu.approx = [mu, T](const BitString& s, std::uint64_t i) {
        std::size_t m = 0;  // longest prefix length in T
        bool left = false;
        for (std::size_t k = 1; k <= s.size(); ++k) {
            bool in = T(s.substr(0, k));
            if (in && left) throw InvariantViolation("remove_atoms: tree not downward closed at " + s.substr(0, k));
            if (in) m = k;
            else left = true;
        }
        if (m + 1 >= s.size()) return mu.approx(s, i);
        return mu.approx(s.substr(0, m + 1), i).shifted(s.size() - m - 1);
    };
    return nu;
}

// Checks downward closure of T on strings up to depth.
inline std::optional<BitString> downward_closure_violation(const TreePredicate& T, std::size_t depth) {
    if (!T("")) return BitString{};
    for (std::size_t k = 1; k <= depth; ++k)
        for (const auto& s : all_strings(k))
            if (T(s) && !T(parent(s))) return s;
    return std::nullopt;
}

// h = f^{-1} where f is the sandwich search.
inline Order global_complexity_bound(const MeasureOracle& o, std::uint64_t budget) {
    struct Cache {
        std::mutex m;
        std::map<std::uint64_t, std::uint64_t> f;
    };
    auto cache = std::make_shared<Cache>();
    auto f = [o, budget, cache](std::uint64_t n) -> std::uint64_t {
        {
            std::lock_guard lk(cache->m);
            auto it = cache->f.find(n);
            if (it != cache->f.end()) return it->second;
        }
        std::uint64_t v = granularity_sandwich(o, n, budget);
        std::lock_guard lk(cache->m);
        cache->f[n] = v;
        return v;
    };
    auto eval = [f](std::uint64_t n) {
        if (n == 0) return std::uint64_t{0};
        std::uint64_t k = 0;
        while (f(k) < n) ++k;
        return k;
    };
    auto wit = [f](std::uint64_t N) {
        std::uint64_t m = 0;
        for (std::uint64_t j = 0; j < N; ++j) m = std::max(m, f(j));
        return N == 0 ? std::uint64_t{0} : m + 1;
    };
    return Order(eval, wit, "global_bound(" + o.name + ")");
}

using HaltStub = std::function<std::optional<std::uint64_t>(std::uint64_t)>;

// Heavy path 1^l: odd levels 2n+1 give 1^(2n+1) mass 2^-(n+1); at even level 2n the two children of 1^(2n-1)
// get (0, 2^-n) while φ_n(n) runs and (2^-t', 2^-n - 2^-t') once it halts at t, t' = max(t, n+1).
// approx(σ, s) is the stage-s value. Every other split is even.
inline MeasureOracle noncomputable_granularity_measure(HaltStub stub) {
    MeasureOracle o;
    o.exact = false;
    o.name = "noncomputable-granularity";
    o.approx = [stub](const BitString& sigma, std::uint64_t stage) {
        Dyadic m(1);
        bool heavy = true;
        for (std::size_t l = 1; l <= sigma.size(); ++l) {
            char c = sigma[l - 1];
            if (!heavy) {
                m = m.half();
                continue;
            }
            if (l % 2 == 1) {
                Dyadic top = Dyadic::pow2neg((l + 1) / 2);
                m = c == '1' ? top : m - top;
            } else {
                std::uint64_t n = l / 2;
                auto t = stub(n);
                if (t && *t == 0) throw InvariantViolation("halting stage 0 for index " + std::to_string(n));
                if (t && *t <= stage) {
                    Dyadic low = Dyadic::pow2neg(std::max<std::uint64_t>(*t, n + 1));
                    m = c == '1' ? m - low : low;
                } else if (c == '0') {
                    m = Dyadic();
                }
            }
            heavy = c == '1';
        }
        return m;
    };
    return o;
}

// Staged approximations U_i[s] as finite prefix-free sets.
struct StagedOpenSet {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<BitString>> stages;

    const std::vector<BitString>& at(std::uint64_t i, std::uint64_t s) const {
        static const std::vector<BitString> empty;
        auto it = stages.find({i, s});
        return it == stages.end() ? empty : it->second;
    }
};

inline bool prefix_free(const std::vector<BitString>& v) {
    for (std::size_t a = 0; a < v.size(); ++a)
        for (std::size_t b = 0; b < v.size(); ++b)
            if (a != b && is_prefix(v[a], v[b])) return false;
    return true;
}

// Every recorded stage prefix-free; each later recorded stage of the same index covers the earlier one.
inline std::optional<std::string> staged_open_set_violation(const StagedOpenSet& u) {
    const std::vector<BitString>* prev = nullptr;
    std::uint64_t prev_i = 0;
    for (const auto& [key, v] : u.stages) {
        if (!prefix_free(v))
            return "stage i=" + std::to_string(key.first) + " s=" + std::to_string(key.second) + " not prefix-free";
        if (prev && prev_i == key.first) {
            for (const auto& a : *prev) {
                bool covered = false;
                for (const auto& b : v) covered = covered || is_prefix(b, a);
                if (!covered) return "stage i=" + std::to_string(key.first) + " s=" + std::to_string(key.second) +
                                     " loses " + render_bits(a);
            }
        }
        prev = &v;
        prev_i = key.first;
    }
    return std::nullopt;
}

// μ(U_i[s]); the caller compares against 2^-i.
inline Dyadic ml_test_margin(const StagedOpenSet& u, const MeasureOracle& mu, std::uint64_t i, std::uint64_t s) {
    const auto& v = u.at(i, s);
    if (!prefix_free(v)) throw InvariantViolation("ml_test_margin: stage set not prefix-free");
    std::uint64_t extra = 0;
    while ((std::uint64_t{1} << extra) < v.size()) ++extra;
    Dyadic total;
    for (const auto& sigma : v) total += mu.approx(sigma, i + 4 + extra);
    return total;
}

inline void write_mltest(std::ostream& os, const StagedOpenSet& u) {
    os << "mltest v1\n";
    for (const auto& [key, v] : u.stages)
        for (const auto& s : v) os << "i=" << key.first << " s=" << key.second << " " << render_bits(s) << "\n";
}

inline StagedOpenSet read_mltest(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "mltest v1") throw ParseError("mltest: bad header");
    StagedOpenSet u;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, bits, extra;
        auto num = [&](const std::string& tok, const char* key) {
            std::string p = std::string(key) + "=";
            std::string rest = tok.rfind(p, 0) == 0 ? tok.substr(p.size()) : "";
            if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
                throw ParseError("mltest: line " + std::to_string(lineno) + " malformed");
            return std::stoull(rest);
        };
        if (!(ls >> a >> b >> bits) || (ls >> extra)) throw ParseError("mltest: line " + std::to_string(lineno));
        std::uint64_t i = num(a, "i"), s = num(b, "s");
        try {
            u.stages[{i, s}].push_back(parse_bits(bits));
        } catch (const std::invalid_argument& e) {
            throw ParseError(std::string("mltest: ") + e.what());
        }
    }
    return u;
}

struct TrivialityReport {
    Dyadic lower;
    std::vector<BitString> candidates;
};

// Heuristic: leaves at full depth with mass >= threshold that kept their mass over the last `window` levels.
inline TrivialityReport triviality_mass(const MeasureTree& t, const Dyadic& atom_threshold, std::size_t window = 1) {
    TrivialityReport r;
    std::size_t d = t.depth();
    for (const auto& [s, v] : t.level(d)) {
        if (v < atom_threshold) continue;
        bool steady = d >= window;
        for (std::size_t w = 1; steady && w <= window; ++w) steady = t.get(s.substr(0, d - w)) == v;
        if (steady) {
            r.lower += v;
            r.candidates.push_back(s);
        }
    }
    return r;
}

}  // namespace cantor
