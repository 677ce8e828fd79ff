#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/errors.hpp"
#include "cantor/measure_tree.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cantor {

using StringPair = std::pair<BitString, BitString>;

// Finite stage of a Turing functional: pairs (input, output).
struct MonotonePairSet {
    std::set<StringPair> pairs;
    std::uint64_t stage = 0;

    void add(BitString in, BitString out) { pairs.emplace(std::move(in), std::move(out)); }
};

// Finite stage of a prefix-free machine: program -> output.
struct PrefixMachineTable {
    std::map<BitString, BitString> rules;
};

struct PairViolation {
    StringPair first, second;
};

// Comparable inputs must have comparable outputs.
inline std::optional<PairViolation> functional_violation(const MonotonePairSet& S) {
    std::vector<StringPair> v(S.pairs.begin(), S.pairs.end());
    std::sort(v.begin(), v.end(), [](const StringPair& a, const StringPair& b) {
        return shortlex_less(a.first, b.first) || (a.first == b.first && a.second < b.second);
    });
    // Longest output per input; all outputs at one input must be comparable.
    std::map<BitString, BitString> best;
    for (const auto& p : v) {
        auto it = best.find(p.first);
        if (it == best.end()) {
            best.emplace(p.first, p.second);
            continue;
        }
        if (!comparable(it->second, p.second)) return PairViolation{{p.first, it->second}, p};
        if (p.second.size() > it->second.size()) it->second = p.second;
    }
    for (const auto& [in, out] : best) {
        for (std::size_t k = 0; k < in.size(); ++k) {
            auto it = best.find(in.substr(0, k));
            if (it != best.end() && !comparable(it->second, out)) return PairViolation{*it, {in, out}};
        }
    }
    return std::nullopt;
}

inline bool functional_validate(const MonotonePairSet& S) { return !functional_violation(S).has_value(); }

inline void require_valid(const MonotonePairSet& S) {
    if (auto v = functional_violation(S))
        throw InvariantViolation("inconsistent functional: (" + render_bits(v->first.first) + "," +
                                 render_bits(v->first.second) + ") vs (" + render_bits(v->second.first) + "," +
                                 render_bits(v->second.second) + ")");
}

// Φ^σ: the longest output over inputs σ' ⪯ σ.
class FunctionalIndex {
public:
    explicit FunctionalIndex(const MonotonePairSet& S) {
        require_valid(S);
        for (const auto& [in, out] : S.pairs) {
            auto& cur = best_[in];
            if (out.size() >= cur.size()) cur = out;
        }
    }

    BitString apply(const BitString& sigma) const { return apply_defined(sigma).value_or(BitString{}); }

    // nullopt when no input of S is a prefix of σ.
    std::optional<BitString> apply_defined(const BitString& sigma) const {
        std::optional<BitString> result;
        for (std::size_t k = 0; k <= sigma.size(); ++k) {
            auto it = best_.find(sigma.substr(0, k));
            if (it != best_.end() && (!result || it->second.size() > result->size())) result = it->second;
        }
        return result;
    }

    const std::map<BitString, BitString>& table() const { return best_; }

private:
    std::map<BitString, BitString> best_;
};

inline BitString apply_prefix(const MonotonePairSet& S, const BitString& sigma) { return FunctionalIndex(S).apply(sigma); }

// Strings with no proper prefix in the set, i.e. the minimal antichain generating the same open set.
inline std::vector<BitString> minimal_antichain(std::vector<BitString> v) {
    std::sort(v.begin(), v.end(), shortlex_less);
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::set<BitString> kept;
    std::vector<BitString> out;
    for (const auto& s : v) {
        bool covered = false;
        for (std::size_t k = 0; k <= s.size() && !covered; ++k) covered = kept.count(s.substr(0, k)) > 0;
        if (!covered) {
            kept.insert(s);
            out.push_back(s);
        }
    }
    return out;
}

// Φ^{-1}(τ) = {σ : (σ, τ') ∈ S for some τ' ⪰ τ}
inline std::vector<BitString> preimage(const MonotonePairSet& S, const BitString& tau) {
    std::vector<BitString> v;
    for (const auto& [in, out] : S.pairs)
        if (is_prefix(tau, out)) v.push_back(in);
    return minimal_antichain(std::move(v));
}

inline Dyadic antichain_measure(const std::vector<BitString>& antichain, const MeasureOracle& mu,
                                std::uint64_t precision = 64) {
    Dyadic total;
    for (const auto& s : antichain) total += mu.approx(s, precision);
    return total;
}

// μ(⟦Φ^{-1}(τ)⟧)
inline Dyadic preimage_measure(const MonotonePairSet& S, const BitString& tau, const MeasureOracle& mu) {
    require_valid(S);
    return antichain_measure(preimage(S, tau), mu);
}

// λ_Φ(τ), without re-validating S.
inline Dyadic lambda_phi(const MonotonePairSet& S, const BitString& tau) {
    Dyadic total;
    for (const auto& s : preimage(S, tau)) total += Dyadic::pow2neg(s.size());
    return total;
}

struct SemimeasureReport {
    bool ok = true;
    bool precondition_failed = false;
    std::optional<BitString> offender;
    explicit operator bool() const { return ok; }
};

// λ_Φ(σ) >= λ_Φ(σ0) + λ_Φ(σ1) for all |σ| < depth.
inline SemimeasureReport semimeasure_check(const MonotonePairSet& S, std::size_t depth) {
    if (!functional_validate(S)) return {false, true, std::nullopt};
    for (std::size_t k = 0; k < depth; ++k)
        for (const auto& s : all_strings(k))
            if (lambda_phi(S, s) < lambda_phi(S, s + "0") + lambda_phi(S, s + "1")) return {false, false, s};
    return {};
}

// Pairs (σ, outer(inner(σ))) for σ among inner's inputs where outer is defined on inner(σ).
inline MonotonePairSet compose(const MonotonePairSet& outer, const MonotonePairSet& inner) {
    FunctionalIndex fo(outer), fi(inner);
    MonotonePairSet r;
    r.stage = std::min(outer.stage, inner.stage);
    for (const auto& [in, out] : fi.table())
        if (auto y = fo.apply_defined(fi.apply(in))) r.add(in, *y);
    return r;
}

inline bool prefix_free_domain(const PrefixMachineTable& U) {
    std::optional<BitString> prev;
    for (const auto& [p, out] : U.rules) {
        // Lexicographic order puts a prefix immediately before some extension chain; check neighbors.
        if (prev && is_prefix(*prev, p)) return false;
        prev = p;
    }
    return true;
}

// Shortest program for σ, ties broken lexicographically.
inline std::optional<BitString> shortest_program(const PrefixMachineTable& U, const BitString& sigma) {
    std::optional<BitString> best;
    for (const auto& [p, out] : U.rules)
        if (out == sigma && (!best || shortlex_less(p, *best))) best = p;
    return best;
}

// Pairs (ρ0ρ1, στ) with U(ρ0) = σ and (ρ1, τ) ∈ S.
inline MonotonePairSet psi_combinator(const PrefixMachineTable& U, const MonotonePairSet& S) {
    if (!prefix_free_domain(U)) throw InvariantViolation("psi_combinator: machine domain not prefix-free");
    require_valid(S);
    MonotonePairSet r;
    r.stage = S.stage;
    for (const auto& [rho0, sigma] : U.rules)
        for (const auto& [rho1, tau] : S.pairs) r.add(rho0 + rho1, sigma + tau);
    return r;
}

namespace functionals {

inline MonotonePairSet identity(std::size_t depth) {
    MonotonePairSet S;
    for (std::size_t k = 0; k <= depth; ++k)
        for (const auto& s : all_strings(k)) S.add(s, s);
    return S;
}

// σ |-> 1σ on inputs up to depth.
inline MonotonePairSet prepend_one(std::size_t depth) {
    MonotonePairSet S;
    for (std::size_t k = 0; k <= depth; ++k)
        for (const auto& s : all_strings(k)) S.add(s, "1" + s);
    return S;
}

}  // namespace functionals

inline void write_functional(std::ostream& os, const MonotonePairSet& S) {
    os << "functional v1 stage=" << S.stage << "\n";
    for (const auto& [in, out] : S.pairs) os << render_bits(in) << " " << render_bits(out) << "\n";
}

inline void write_pfm(std::ostream& os, const PrefixMachineTable& U) {
    os << "pfm v1\n";
    for (const auto& [p, out] : U.rules) os << render_bits(p) << " " << render_bits(out) << "\n";
}

namespace detail {

template <class F>
void read_pairs(std::istream& is, const std::string& what, F&& f) {
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b, extra;
        if (!(ls >> a >> b) || (ls >> extra)) throw ParseError(what + ": line " + std::to_string(lineno) + " malformed");
        try {
            f(parse_bits(a), parse_bits(b));
        } catch (const std::invalid_argument& e) {
            throw ParseError(what + ": line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace detail

inline MonotonePairSet read_functional(std::istream& is) {
    std::string line;
    const std::string head = "functional v1 stage=";
    if (!std::getline(is, line) || line.rfind(head, 0) != 0) throw ParseError("functional: bad header");
    std::string st = line.substr(head.size());
    if (st.empty() || st.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("functional: bad stage");
    MonotonePairSet S;
    S.stage = std::stoull(st);
    detail::read_pairs(is, "functional", [&](BitString a, BitString b) { S.add(std::move(a), std::move(b)); });
    return S;
}

inline PrefixMachineTable read_pfm(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "pfm v1") throw ParseError("pfm: bad header");
    PrefixMachineTable U;
    detail::read_pairs(is, "pfm", [&](BitString a, BitString b) {
        if (!U.rules.emplace(std::move(a), std::move(b)).second) throw ParseError("pfm: duplicate program");
    });
    return U;
}

}  // namespace cantor
