#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/encoders.hpp"
#include "cantor/errors.hpp"
#include "cantor/measure_tree.hpp"
#include "cantor/measures.hpp"
#include "cantor/orders.hpp"
#include "cantor/pcf.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cantor {

// ---- Uniform atoms ----

struct AtomsEvent {
    std::uint64_t stage;
    std::string kind;  // seed | halve | append
    BitString node;
    Dyadic value;
};

struct ConstructionState4 {
    std::uint64_t stage = 0;
    std::map<std::uint64_t, std::vector<BitString>> L;  // L_i at the last stage, in insertion order
    std::map<std::uint64_t, std::uint64_t> n;        // n_i at the last stage
    std::map<std::uint64_t, std::vector<std::uint64_t>> halving_stages;
    std::vector<AtomsEvent> events;
};

struct AtomsResult {
    MeasureTree tree;
    ConstructionState4 state;
};

namespace detail {

inline std::size_t neighborhood_of(const BitString& s) { return s.find('1'); }

// Checks conventions A-C at a halting event of φ_i(n) at stage s.
inline void check_event(const StepPCF& p, std::uint64_t i, std::uint64_t n, std::uint64_t s,
                        const std::vector<std::uint64_t>& earlier) {
    std::uint64_t v = p.value(i, n);
    if (v > s) throw InvariantViolation("pcf convention A violated at i=" + std::to_string(i) + " n=" + std::to_string(n));
    if (n > s) throw InvariantViolation("pcf convention C violated at i=" + std::to_string(i) + " n=" + std::to_string(n));
    if (!earlier.empty() && earlier.back() >= s)
        throw InvariantViolation("pcf convention B violated at i=" + std::to_string(i) + " n=" + std::to_string(n));
}

}  // namespace detail

// Stage s defines μ on strings of length s; the neighborhood 0^i 1 is active from stage i+2.
inline AtomsResult build_uniform_atoms_measure(const StepPCF& p, std::size_t depth, bool record_append = true) {
    AtomsResult r{MeasureTree(depth), {}};
    auto& st = r.state;
    r.tree.set("", Dyadic(1));
    std::vector<std::size_t> tau_len{0};  // |τ| per nonzero node of the last level, in level order
    for (std::uint64_t s = 1; s <= depth; ++s) {
        std::map<std::uint64_t, bool> event;
        for (std::uint64_t i = 0; i + 2 <= s; ++i) {
            std::uint64_t n = st.n[i];
            bool e = p.halts_exactly_at(i, n + i, s);
            if (e) detail::check_event(p, i, n + i, s, st.halving_stages[i]);
            event[i] = e;
        }
        const auto& level = r.tree.level(s - 1);
        if (level.size() != tau_len.size()) throw InvariantViolation("uniform atoms: level bookkeeping out of step");
        std::map<std::uint64_t, std::vector<BitString>> added;
        std::vector<std::size_t> next_tau;
        next_tau.reserve(2 * level.size());
        std::size_t idx = 0;
        // Parents in lexicographic order yield children in lexicographic order.
        for (const auto& [rho, mass] : level) {
            std::size_t tau = tau_len[idx++];
            if (rho.find('1') == BitString::npos) {
                Dyadic v = Dyadic::pow2neg(s);
                BitString a = rho + "0", b = rho + "1";
                r.tree.append(a, v);
                r.tree.append(b, v);
                st.events.push_back({s, "seed", a, v});
                st.events.push_back({s, "seed", b, v});
                st.L[s - 1].push_back(b);
                st.n.emplace(s - 1, 0);
                next_tau.push_back(0);
                next_tau.push_back(b.size());
                continue;
            }
            std::uint64_t i = detail::neighborhood_of(rho);
            // Longest τ in L_i with ρ = τ 0^{j-1}, carried down from the parent.
            if (tau == 0 || tau > rho.size() || rho.find('1', tau) != BitString::npos)
                throw InvariantViolation("uniform atoms: nonzero node " + render_bits(rho) + " matches no τ");
            if (event[i]) {
                Dyadic h = mass.half();
                for (const char* c : {"0", "1"}) {
                    BitString child = rho + c;
                    r.tree.append(child, h);
                    next_tau.push_back(child.size());
                    st.events.push_back({s, "halve", child, h});
                    if (record_append) st.events.push_back({s, "append", child, h});
                    added[i].push_back(std::move(child));
                }
            } else {
                r.tree.append(rho + "0", mass);
                next_tau.push_back(tau);
            }
        }
        tau_len = std::move(next_tau);
        // L_i grows after the whole level is defined, so matches above use L_i[s-1].
        for (const auto& [i, e] : event) {
            if (!e) continue;
            for (auto& c : added[i]) st.L[i].push_back(std::move(c));
            st.halving_stages[i].push_back(s);
            ++st.n[i];
        }
        st.stage = s;
    }
    return r;
}

// μ(σ) by following σ alone; agrees with build_uniform_atoms_measure at every depth.
inline MeasureOracle uniform_atoms_oracle(const StepPCF& p) {
    MeasureOracle o;
    o.exact = true;
    o.name = "atoms4(" + p.name + ")";
    o.approx = [p](const BitString& sigma, std::uint64_t) {
        std::size_t i = sigma.find('1');
        if (i == BitString::npos) return Dyadic::pow2neg(sigma.size());
        Dyadic mass = Dyadic::pow2neg(i + 1);
        std::uint64_t n = 0;
        for (std::uint64_t s = i + 2; s <= sigma.size(); ++s) {
            if (p.halts_exactly_at(i, n + i, s)) {
                mass = mass.half();
                ++n;
            } else if (sigma[s - 1] == '1') {
                return Dyadic();
            }
        }
        return mass;
    };
    return o;
}

inline void write_trace(std::ostream& os, const ConstructionState4& st) {
    for (const auto& e : st.events)
        os << "stage=" << e.stage << " event=" << e.kind << " node=" << render_bits(e.node) << " value=" << e.value.str() << "\n";
}

// Path in ⟦0^i 1⟧ that takes b-bits at halving stages (0 once bits run out) and zeros elsewhere.
inline BitString atoms_path(const StepPCF& p, std::uint64_t i, std::size_t depth, const BitString& b_bits = "") {
    BitString X(i, '0');
    X += '1';
    std::uint64_t n = 0;
    std::size_t used = 0;
    for (std::uint64_t s = i + 2; s <= depth; ++s) {
        if (p.halts_exactly_at(i, n + i, s)) {
            ++n;
            X += used < b_bits.size() ? b_bits[used++] : '0';
        } else {
            X += '0';
        }
    }
    return X;
}

struct Claim4Row {
    std::uint64_t k, g, phi;
};

struct Claim4Report {
    bool ok = true;
    std::optional<std::uint64_t> failing_k;
    std::vector<Claim4Row> rows;
    explicit operator bool() const { return ok; }
};

// g_μ^X(i+k) > φ_i(i+k) for all k <= K along the path X of atoms_path.
inline Claim4Report claim4_check(const StepPCF& p, std::uint64_t i, std::uint64_t K, std::size_t depth,
                                 const BitString& b_bits = "") {
    auto o = uniform_atoms_oracle(p);
    BitString X = atoms_path(p, i, depth, b_bits);
    Claim4Report r;
    for (std::uint64_t k = 0; k <= K; ++k) {
        auto t = p.halting_time(i, i + k);
        if (!t || *t > depth) throw DepthExceeded("claim4_check: φ_i(i+k) does not halt within depth");
        std::uint64_t phi = p.value(i, i + k);
        std::uint64_t g = local_granularity(o, X, i + k);
        r.rows.push_back({k, g, phi});
        if (!(g > phi) && r.ok) {
            r.ok = false;
            r.failing_k = k;
        }
    }
    return r;
}

// ---- Orders growth lemma ----

// n <= N with ℓ(g(n)) < h(g(n+1)).
inline std::vector<std::uint64_t> lemma_orders_check(const std::function<std::uint64_t(std::uint64_t)>& g, const Order& ell,
                                                     const Order& h, std::uint64_t N) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t n = 0; n <= N; ++n) {
        if (g(n + 1) <= g(n)) throw OrderError("lemma_orders_check: g not strictly increasing at " + std::to_string(n));
        if (ell(g(n)) < h(g(n + 1))) out.push_back(n);
    }
    return out;
}

// ---- Finite trees, perfectness, diminutive scan ----

struct FiniteTree {
    std::set<BitString> nodes;  // prefix-closed
    std::size_t depth = 0;

    static FiniteTree complete(std::size_t depth) {
        FiniteTree t;
        t.depth = depth;
        for (std::size_t k = 0; k <= depth; ++k)
            for (const auto& s : all_strings(k)) t.nodes.insert(s);
        return t;
    }

    static FiniteTree from_leaves(const std::vector<BitString>& leaves, std::size_t depth) {
        FiniteTree t;
        t.depth = depth;
        t.nodes.insert("");
        for (const auto& l : leaves)
            for (std::size_t k = 0; k <= std::min(l.size(), depth); ++k) t.nodes.insert(l.substr(0, k));
        return t;
    }

    static FiniteTree support(const MeasureTree& m) {
        FiniteTree t;
        t.depth = m.depth();
        for (std::size_t k = 0; k <= m.depth(); ++k)
            for (const auto& [s, v] : m.level(k)) t.nodes.insert(s);
        return t;
    }

    // Suffixes of the nodes below prefix.
    FiniteTree below(const BitString& prefix) const {
        FiniteTree t;
        if (prefix.size() > depth) return t;
        t.depth = depth - prefix.size();
        for (auto it = nodes.lower_bound(prefix); it != nodes.end() && is_prefix(prefix, *it); ++it)
            t.nodes.insert(it->substr(prefix.size()));
        return t;
    }

    // Nodes with a descendant at the leaf level.
    std::set<BitString> extendible() const {
        std::set<BitString> ext;
        for (const auto& s : nodes)
            if (s.size() == depth)
                for (std::size_t k = 0; k <= s.size(); ++k) ext.insert(s.substr(0, k));
        return ext;
    }
};

namespace detail {

inline std::vector<std::uint64_t> order_levels(const Order& f, std::size_t depth) {
    std::vector<std::uint64_t> lv{f(0)};
    for (std::uint64_t n = 1;; ++n) {
        std::uint64_t v = f(n);
        if (v > depth) break;
        if (v <= lv.back()) throw OrderError(f.name() + ": not strictly increasing at " + std::to_string(n));
        lv.push_back(v);
    }
    return lv;
}

inline std::map<BitString, std::size_t> count_by_prefix(const std::set<BitString>& at_level, std::size_t cut) {
    std::map<BitString, std::size_t> c;
    for (const auto& s : at_level) ++c[s.substr(0, cut)];
    return c;
}

inline std::set<BitString> at_level(const std::set<BitString>& s, std::size_t k) {
    std::set<BitString> out;
    for (const auto& x : s)
        if (x.size() == k) out.insert(x);
    return out;
}

}  // namespace detail

// Every extendible node at level f(n) has two extendible extensions at level f(n+1), whenever f(n+1) <= depth.
inline bool perfectness_check(const FiniteTree& T, const Order& f, std::size_t depth) {
    FiniteTree t = T;
    t.depth = depth;
    auto ext = t.extendible();
    auto lv = detail::order_levels(f, depth);
    for (std::size_t n = 0; n + 1 < lv.size(); ++n) {
        auto counts = detail::count_by_prefix(detail::at_level(ext, lv[n + 1]), lv[n]);
        for (const auto& s : detail::at_level(ext, lv[n])) {
            auto it = counts.find(s);
            if (it == counts.end() || it->second < 2) return false;
        }
    }
    return true;
}

struct DiminutiveEntry {
    std::string order;
    bool found;  // some pruning of T is f-perfect on the range
};

struct DiminutiveReport {
    std::vector<DiminutiveEntry> entries;
    std::string label = "no f-perfect subtree found in family";
    bool none_found() const {
        return std::none_of(entries.begin(), entries.end(), [](const DiminutiveEntry& e) { return e.found; });
    }
};

// Exact search over prunings: a node at level f(n) survives iff two surviving nodes at level f(n+1) extend it.
inline DiminutiveReport diminutive_scan(const FiniteTree& T, const std::vector<Order>& F, std::size_t depth) {
    FiniteTree t = T;
    t.depth = depth;
    auto ext = t.extendible();
    DiminutiveReport rep;
    for (const auto& f : F) {
        auto lv = detail::order_levels(f, depth);
        std::set<BitString> good = detail::at_level(ext, lv.back());
        for (std::size_t n = lv.size() - 1; n-- > 0;) {
            auto counts = detail::count_by_prefix(good, lv[n]);
            std::set<BitString> next;
            for (const auto& s : detail::at_level(ext, lv[n])) {
                auto it = counts.find(s);
                if (it != counts.end() && it->second >= 2) next.insert(s);
            }
            good = std::move(next);
        }
        bool found = !good.empty();
        rep.entries.push_back({f.name(), found});
    }
    return rep;
}

// ---- Tree stages, Ξ and Λ ----

// Limit-monotone approximation T_s; membership of σ's prefixes is constant from settle(σ) on.
struct TreeStages {
    std::function<bool(const BitString&, std::uint64_t)> in;
    std::function<std::uint64_t(const BitString&)> settle;
    std::string name = "tree";
};

// Least s with every prefix of σ in T_s; nullopt when no such stage exists.
inline std::optional<std::uint64_t> tree_stage(const TreeStages& T, const BitString& sigma) {
    std::uint64_t last = T.settle(sigma);
    for (std::uint64_t s = 0; s <= last; ++s) {
        bool all = true;
        for (std::size_t k = 0; k <= sigma.size() && all; ++k) all = T.in(sigma.substr(0, k), s);
        if (all) return s;
    }
    return std::nullopt;
}

namespace tree_stages {

inline TreeStages full() {
    return {[](const BitString&, std::uint64_t) { return true; }, [](const BitString&) { return std::uint64_t{0}; }, "full"};
}

// Every string, entering at stage |σ|.
inline TreeStages delay() {
    return {[](const BitString& s, std::uint64_t t) { return t >= s.size(); },
            [](const BitString& s) { return static_cast<std::uint64_t>(s.size()); }, "delay"};
}

// Strings without 00, entering at stage |σ|; the rest never enter.
inline TreeStages nozz() {
    return {[](const BitString& s, std::uint64_t t) { return t >= s.size() && s.find("00") == BitString::npos; },
            [](const BitString& s) { return static_cast<std::uint64_t>(s.size()); }, "nozz"};
}

// Like nozz, but strings containing 00 sit in T_s for s < |σ| before leaving.
inline TreeStages flicker() {
    return {[](const BitString& s, std::uint64_t t) {
                bool final = s.find("00") == BitString::npos;
                return final ? t >= s.size() : t < s.size();
            },
            [](const BitString& s) { return static_cast<std::uint64_t>(s.size()); }, "flicker"};
}

inline TreeStages parse(const std::string& name) {
    if (name == "full") return full();
    if (name == "delay") return delay();
    if (name == "nozz") return nozz();
    if (name == "flicker") return flicker();
    throw ParseError("unknown tree stages: " + name);
}

}  // namespace tree_stages

struct DimEncoding {
    BitString output;
    bool one_tail = false;         // some f(Z↾n) diverged
    bool source_exhausted = false;  // Z ran out before n_bits
};

// z_0 then 1^{f(Z↾n)} 0 z_n for n >= 1; a 1-run to n_bits once f diverges.
inline DimEncoding xi_encode_dim(const BitString& Z, const TreeStages& T, std::size_t n_bits) {
    if (Z.empty()) throw DepthExceeded("xi_encode_dim: empty source");
    DimEncoding e;
    e.output = Z.substr(0, 1);
    for (std::size_t n = 1; e.output.size() < n_bits; ++n) {
        if (n >= Z.size()) {
            e.source_exhausted = true;
            break;
        }
        auto f = tree_stage(T, Z.substr(0, n));
        if (!f) {
            e.output.append(n_bits - e.output.size(), '1');
            e.one_tail = true;
            break;
        }
        e.output += BitString(*f, '1') + "0" + Z.substr(n, 1);
    }
    if (e.output.size() > n_bits) e.output.resize(n_bits);
    return e;
}

// Prefix of some Ξ output: a 0 after a run needs run = f(Z↾n); an open run needs run <= f(Z↾n) or divergence.
inline bool xi_dim_member(const TreeStages& T, const BitString& y) {
    if (y.empty()) return true;
    BitString z = y.substr(0, 1);
    std::size_t pos = 1;
    while (pos < y.size()) {
        auto f = tree_stage(T, z);
        std::size_t r = 0;
        while (pos < y.size() && y[pos] == '1') ++r, ++pos;
        if (pos == y.size()) return !f || r <= *f;
        if (!f || r != *f) return false;
        ++pos;  // separator
        if (pos == y.size()) return true;
        z += y[pos++];
    }
    return true;
}

inline TreePredicate xi_dim_tree(const TreeStages& T) {
    return [T](const BitString& y) { return xi_dim_member(T, y); };
}

struct LambdaBlock {
    char bit;
    std::size_t length;
};

struct LambdaResult {
    BitString output;
    std::vector<LambdaBlock> blocks;     // λ_{-1}, λ_0, ...
    std::vector<std::uint64_t> runs;     // line-15 run lengths per j
    std::uint64_t j_final = 0;
    std::size_t output_at_last_j = 0;  // output length when j last advanced
    bool constant_fill = false;        // line 6 fired
    std::string stop;                  // budget | left-S | input-exhausted | steps
    std::uint64_t steps = 0;
};

// Coding locations: b_0 at 0, b_k right after the k-th separator 0.
inline std::vector<std::size_t> coding_locations(const BitString& Y) {
    std::vector<std::size_t> loc;
    if (Y.empty()) return loc;
    loc.push_back(0);
    std::size_t pos = 1;
    while (true) {
        std::size_t q = Y.find('0', pos);
        if (q == BitString::npos || q + 1 >= Y.size()) break;
        loc.push_back(q + 1);
        pos = q + 2;
    }
    return loc;
}

inline LambdaResult lambda_decode(const BitString& Y, const TreePredicate& S, const StepPCF& p, std::uint64_t max_steps,
                                  std::size_t budget, std::uint64_t index = 0) {
    if (Y.empty()) throw DepthExceeded("lambda_decode: empty input");
    LambdaResult r;
    auto loc = coding_locations(Y);
    auto b = [&](std::int64_t j) { return Y[loc[j < 0 ? 0 : static_cast<std::size_t>(j)]]; };
    auto m_of = [&](std::size_t ell) -> std::int64_t {
        std::int64_t m = -1;
        for (std::size_t k = 0; k < loc.size() && loc[k] < ell; ++k) m = static_cast<std::int64_t>(k);
        return m;
    };
    std::vector<LambdaBlock>& blocks = r.blocks;  // blocks[j+1] is λ_j
    blocks.push_back({b(-1), 0});
    auto append = [&](std::size_t block, char bit, std::size_t count) {
        while (blocks.size() <= block) blocks.push_back({bit, 0});
        blocks[block].bit = bit;
        std::size_t room = budget - r.output.size();
        std::size_t take = std::min(count, room);
        blocks[block].length += take;
        r.output.append(take, bit);
    };
    std::int64_t j = 0;
    std::map<std::int64_t, std::size_t> k;
    std::uint64_t s = 0;
    r.stop = "steps";
    for (; s <= max_steps; ++s) {
        if (r.output.size() >= budget) {
            r.stop = "budget";
            break;
        }
        if (s > Y.size()) {
            r.stop = "input-exhausted";
            break;
        }
        if (!S(Y.substr(0, s))) {
            append(static_cast<std::size_t>(j), b(j - 1), budget - r.output.size());
            r.constant_fill = true;
            r.stop = "left-S";
            break;
        }
        std::size_t& kj = k.try_emplace(j, 1).first->second;
        bool located = static_cast<std::size_t>(j) < loc.size() && loc[static_cast<std::size_t>(j)] < kj;
        if (!located) {
            if (kj > Y.size()) {
                r.stop = "input-exhausted";
                break;
            }
            append(static_cast<std::size_t>(j), b(j - 1), 1);
            ++kj;
            continue;
        }
        std::int64_t m = m_of(kj);
        auto t = p.halting_time(index, static_cast<std::uint64_t>(j));
        bool halted = m >= 0 && t && *t <= static_cast<std::uint64_t>(m);
        if (!halted) {
            append(static_cast<std::size_t>(j), b(j - 1), 1);
            ++kj;
            continue;
        }
        std::size_t run = kj;
        for (std::size_t l = 1; l < blocks.size() && l <= static_cast<std::size_t>(j); ++l) run += blocks[l].length;
        r.runs.push_back(run);
        append(static_cast<std::size_t>(j) + 1, b(j), run);
        ++j;
        r.output_at_last_j = r.output.size();
    }
    r.steps = s;
    r.j_final = static_cast<std::uint64_t>(j);
    return r;
}

struct Case3Report {
    bool non_decreasing = true;
    bool dominates_phi = true;
    std::vector<std::size_t> lengths;  // |λ_i| for closed blocks
    explicit operator bool() const { return non_decreasing && dominates_phi; }
};

// Closed blocks λ_0..λ_{j-2}: lengths non-decreasing and |λ_i| >= φ(i') for all i' <= i.
inline Case3Report case3_structure(const LambdaResult& r, const StepPCF& p, std::uint64_t index = 0) {
    Case3Report c;
    if (r.j_final < 2) return c;
    std::uint64_t max_phi = 0;
    for (std::uint64_t i = 0; i + 1 < r.j_final; ++i) {
        std::size_t len = r.blocks[i + 1].length;
        if (!c.lengths.empty() && len < c.lengths.back()) c.non_decreasing = false;
        c.lengths.push_back(len);
        max_phi = std::max(max_phi, p.value(index, i));
        if (len < max_phi) c.dominates_phi = false;
    }
    return c;
}

// Outputs of Λ∘Ξ over every source of length z_len, truncated to depth.
inline FiniteTree pipeline_output_tree(const TreeStages& T, const StepPCF& p, std::size_t z_len, std::size_t n_bits,
                                       std::uint64_t max_steps, std::size_t depth) {
    auto S = xi_dim_tree(T);
    std::vector<BitString> leaves;
    for (const auto& Z : all_strings(z_len)) {
        auto y = xi_encode_dim(Z, T, n_bits);
        auto w = lambda_decode(y.output, S, p, max_steps, depth);
        if (w.output.size() >= depth) leaves.push_back(w.output.substr(0, depth));
    }
    return FiniteTree::from_leaves(leaves, depth);
}

// ---- Configs ----

struct ConstructConfig {
    std::string kind;
    std::size_t depth = 0;
    std::string pcf = "sched:linear";
    BitString seed;
    std::string tree = "delay";
    std::size_t blocks = 0;
    std::uint64_t budget = 1'000'000;
};

// construct v1 kind=<...> depth=<D> pcf=<spec> seed=<bits> [tree=<name>] [blocks=<n>] [budget=<n>]
inline ConstructConfig parse_construct_config(const std::string& text) {
    std::istringstream is(text);
    std::string a, b;
    if (!(is >> a >> b) || a != "construct" || b != "v1") throw ParseError("construct config: bad header");
    ConstructConfig c;
    auto number = [](const std::string& key, const std::string& v) {
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("construct config: bad number for " + key);
        return std::stoull(v);
    };
    for (std::string tok; is >> tok;) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError("construct config: bad token " + tok);
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "kind") {
            static const std::set<std::string> kinds{"atoms4", "gamma", "xi-ioc", "xi-dim", "lambda"};
            if (!kinds.count(val)) throw ParseError("construct config: unknown kind " + val);
            c.kind = val;
        } else if (key == "depth") {
            c.depth = number(key, val);
        } else if (key == "pcf") {
            c.pcf = val;
        } else if (key == "seed") {
            if (!is_bitstring(val) && val != "-") throw ParseError("construct config: bad seed " + val);
            c.seed = val == "-" ? BitString{} : val;
        } else if (key == "tree") {
            c.tree = val;
        } else if (key == "blocks") {
            c.blocks = number(key, val);
        } else if (key == "budget") {
            c.budget = number(key, val);
        } else {
            throw ParseError("construct config: unknown key " + key);
        }
    }
    if (c.kind.empty()) throw ParseError("construct config: missing kind");
    return c;
}

}  // namespace cantor
