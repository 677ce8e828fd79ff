#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/dyadic.hpp"
#include "cantor/encoders.hpp"
#include "cantor/errors.hpp"
#include "cantor/functionals.hpp"
#include "cantor/measure_tree.hpp"
#include "cantor/orders.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cantor {

// Natural number or the "not yet bounded" sentinel, which sorts above every natural.
class Complexity {
public:
    static Complexity infinity() { return Complexity(0, true); }
    static Complexity finite(std::uint64_t v) { return Complexity(v, false); }

    bool is_infinite() const { return inf_; }
    std::uint64_t value() const {
        if (inf_) throw std::logic_error("Complexity: infinite value has no number");
        return v_;
    }
    std::string str() const { return inf_ ? "inf" : std::to_string(v_); }

    bool operator==(const Complexity&) const = default;
    std::strong_ordering operator<=>(const Complexity& o) const {
        if (inf_ || o.inf_) return static_cast<int>(inf_) <=> static_cast<int>(o.inf_);
        return v_ <=> o.v_;
    }

private:
    Complexity(std::uint64_t v, bool inf) : v_(v), inf_(inf) {}
    std::uint64_t v_;
    bool inf_;
};

class StagedUniversalMachine {
public:
    virtual ~StagedUniversalMachine() = default;
    virtual std::string name() const = 0;
    // Shortest program for σ among rules enumerated by stage t.
    virtual Complexity k(const BitString& sigma, std::uint64_t t) const = 0;
    // M_t(σ): λ of the universal monotone functional at stage t.
    virtual Dyadic m(const BitString& sigma, std::uint64_t t) const = 0;
    // Prefix rules enumerated by stage t with program length <= max_program.
    virtual PrefixMachineTable prefix_table(std::uint64_t t, std::size_t max_program) const = 0;
};

inline Complexity k_t(const StagedUniversalMachine& U, const BitString& sigma, std::uint64_t t) { return U.k(sigma, t); }

inline Complexity ka_t(const StagedUniversalMachine& U, const BitString& sigma, std::uint64_t t) {
    Dyadic m = U.m(sigma, t);
    if (m.is_zero()) return Complexity::infinity();
    return Complexity::finite(ceil_neg_log2(m));
}

// Explicit staged tables; programs and inputs are used verbatim.
class TableMachine : public StagedUniversalMachine {
public:
    struct Rule {
        BitString program, output;
        std::uint64_t stage;
    };
    struct Pair {
        BitString input, output;
        std::uint64_t stage;
    };

    explicit TableMachine(std::string name = "table") : name_(std::move(name)) {}

    void add_rule(BitString program, BitString output, std::uint64_t stage) {
        rules_.push_back({std::move(program), std::move(output), stage});
    }
    void add_pair(BitString input, BitString output, std::uint64_t stage) {
        pairs_.push_back({std::move(input), std::move(output), stage});
    }

    // Component e wrapped under the 1^e 0 coding.
    static TableMachine universal(const std::vector<std::vector<Rule>>& prefix_components,
                                  const std::vector<std::vector<Pair>>& monotone_components, std::string name = "universal") {
        TableMachine u(std::move(name));
        for (std::size_t e = 0; e < prefix_components.size(); ++e)
            for (const auto& r : prefix_components[e]) u.add_rule(std::string(e, '1') + "0" + r.program, r.output, r.stage);
        for (std::size_t e = 0; e < monotone_components.size(); ++e)
            for (const auto& p : monotone_components[e]) u.add_pair(std::string(e, '1') + "0" + p.input, p.output, p.stage);
        return u;
    }

    std::string name() const override { return name_; }

    Complexity k(const BitString& sigma, std::uint64_t t) const override {
        Complexity best = Complexity::infinity();
        for (const auto& r : rules_)
            if (r.stage <= t && r.output == sigma) best = std::min(best, Complexity::finite(r.program.size()));
        return best;
    }

    Dyadic m(const BitString& sigma, std::uint64_t t) const override { return lambda_phi(monotone_stage(t), sigma); }

    PrefixMachineTable prefix_table(std::uint64_t t, std::size_t max_program) const override {
        PrefixMachineTable u;
        for (const auto& r : rules_)
            if (r.stage <= t && r.program.size() <= max_program) u.rules[r.program] = r.output;
        return u;
    }

    MonotonePairSet monotone_stage(std::uint64_t t) const {
        MonotonePairSet s;
        s.stage = t;
        for (const auto& p : pairs_)
            if (p.stage <= t) s.add(p.input, p.output);
        return s;
    }

    // Prefix-free program domain and consistent pair set at stage t.
    bool valid_at(std::uint64_t t) const {
        return prefix_free_domain(prefix_table(t, SIZE_MAX)) && functional_validate(monotone_stage(t));
    }

private:
    std::string name_;
    std::vector<Rule> rules_;
    std::vector<Pair> pairs_;
};

namespace machine {

// Number of items of dovetail lane e enumerated by stage t: item j appears once 2^e (2j+1) - 1 <= t.
inline std::uint64_t lane_count(unsigned e, std::uint64_t t) {
    if (e >= 64) return 0;
    unsigned __int128 q = (static_cast<unsigned __int128>(t) + 1) >> e;
    return static_cast<std::uint64_t>((q + 1) / 2);
}

// 2^|s| - 1 + value(s)
inline std::uint64_t shortlex_index(const BitString& s) {
    if (s.size() >= 63) return std::numeric_limits<std::uint64_t>::max();
    return ((std::uint64_t{1} << s.size()) - 1) + string_index(s);
}

inline BitString binary(std::uint64_t n) {
    if (n == 0) return "0";
    BitString b;
    for (; n; n >>= 1) b.insert(b.begin(), static_cast<char>('0' + (n & 1)));
    return b;
}

// 1^{|b|} 0 b with b = binary(n)
inline BitString self_delimiting(std::uint64_t n) {
    BitString b = binary(n);
    return BitString(b.size(), '1') + "0" + b;
}

inline std::optional<std::pair<std::uint64_t, std::size_t>> read_self_delimiting(const BitString& p, std::size_t pos) {
    std::size_t w = 0;
    while (pos < p.size() && p[pos] == '1') ++w, ++pos;
    if (pos >= p.size() || w == 0 || w > 62) return std::nullopt;
    ++pos;
    if (pos + w > p.size()) return std::nullopt;
    BitString b = p.substr(pos, w);
    if (w > 1 && b[0] == '0') return std::nullopt;
    return std::make_pair(string_index(b), pos + w);
}

inline std::uint64_t gamma_schedule(std::uint64_t n) {
    if (n + 4 >= 63) return std::uint64_t{1} << 62;
    return std::uint64_t{1} << (n + 4);
}

}  // namespace machine

// Bundled reference machine.
// Prefix part: 0 sd(|σ|) σ prints σ (lane 0, item = shortlex index of σ); 10 sd(n) prints 0^n (lane 1, item n).
// Monotone part: 0ρ -> Γ(ρ) with g(n) = 2^{n+4} (lane 0 over nonempty ρ), 10p -> U(p), 110ρ -> ρ (lane 1).
class ReferenceMachine : public StagedUniversalMachine {
public:
    std::string name() const override { return "reference"; }

    Complexity k(const BitString& sigma, std::uint64_t t) const override {
        Complexity best = Complexity::infinity();
        if (machine::shortlex_index(sigma) < machine::lane_count(0, t))
            best = Complexity::finite(1 + machine::self_delimiting(sigma.size()).size() + sigma.size());
        if (sigma.find('1') == BitString::npos && sigma.size() < machine::lane_count(1, t))
            best = std::min(best, Complexity::finite(2 + machine::self_delimiting(sigma.size()).size()));
        return best;
    }

    Dyadic m(const BitString& sigma, std::uint64_t t) const override {
        return lambda_gamma(sigma, t).shifted(1) + lambda_prefix(sigma, t).shifted(2) + lambda_identity(sigma, t).shifted(3);
    }

    PrefixMachineTable prefix_table(std::uint64_t t, std::size_t max_program) const override {
        PrefixMachineTable u;
        std::uint64_t c0 = machine::lane_count(0, t);
        for (std::size_t len = 0; len < 63 && (std::uint64_t{1} << len) - 1 < c0; ++len) {
            std::size_t plen = 1 + machine::self_delimiting(len).size() + len;
            if (plen > max_program) break;
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << len) && (std::uint64_t{1} << len) - 1 + v < c0; ++v) {
                BitString s = nth_string(v, len);
                u.rules["0" + machine::self_delimiting(len) + s] = s;
            }
        }
        std::uint64_t c1 = machine::lane_count(1, t);
        for (std::uint64_t n = 0; n < c1; ++n) {
            BitString p = "10" + machine::self_delimiting(n);
            if (p.size() > max_program) break;
            u.rules[p] = BitString(n, '0');
        }
        return u;
    }

    // Pairs of the monotone part enumerated by t, with inputs up to max_input bits (for brute-force checks).
    MonotonePairSet monotone_table(std::uint64_t t, std::size_t max_input) const {
        MonotonePairSet S;
        S.stage = t;
        std::uint64_t c0 = machine::lane_count(0, t);
        for (std::size_t len = 1; len + 1 <= max_input && len < 63; ++len)
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
                BitString rho = nth_string(v, len);
                if (machine::shortlex_index(rho) - 1 >= c0) continue;
                S.add("0" + rho, gamma_encode(rho, machine::gamma_schedule, len).output);
            }
        if (max_input >= 2)
            for (const auto& [p, out] : prefix_table(t, max_input - 2).rules) S.add("10" + p, out);
        std::uint64_t c1 = machine::lane_count(1, t);
        for (std::size_t len = 0; len + 3 <= max_input && len < 63; ++len)
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
                BitString rho = nth_string(v, len);
                if (machine::shortlex_index(rho) < c1) S.add("110" + rho, rho);
            }
        return S;
    }

    Dyadic lambda_gamma(const BitString& sigma, std::uint64_t t) const {
        auto parse = gamma_parse(sigma, machine::gamma_schedule);
        if (!parse) return Dyadic();
        std::uint64_t L = parse->last_block + 1;
        const BitString& pi = parse->z;
        if (L >= 62) return Dyadic();
        std::uint64_t C = machine::lane_count(0, t);  // nonempty ρ with shortlex index <= C are enumerated
        std::uint64_t last_of_len = (std::uint64_t{1} << (L + 1)) - 2;
        if (last_of_len <= C) return Dyadic::pow2neg(pi.size());
        std::uint64_t width = std::uint64_t{1} << (L - pi.size());
        std::uint64_t base = (std::uint64_t{1} << L) - 1 + string_index(pi) * width;
        if (C < base) return Dyadic();
        std::uint64_t cnt = std::min<std::uint64_t>(C - base + 1, width);
        return Dyadic(BigInt(cnt), L);
    }

    Dyadic lambda_prefix(const BitString& sigma, std::uint64_t t) const {
        Dyadic total;
        std::uint64_t c0 = machine::lane_count(0, t);
        for (std::size_t len = sigma.size(); len < 63 && (std::uint64_t{1} << len) - 1 < c0; ++len) {
            std::uint64_t width = std::uint64_t{1} << (len - sigma.size());
            std::uint64_t base = (std::uint64_t{1} << len) - 1 + string_index(sigma) * width;
            if (base >= c0) continue;
            std::uint64_t cnt = std::min<std::uint64_t>(c0 - base, width);
            std::uint64_t plen = 1 + machine::self_delimiting(len).size() + len;
            total += Dyadic(BigInt(cnt), plen);
        }
        if (sigma.find('1') == BitString::npos) {
            std::uint64_t c1 = machine::lane_count(1, t);
            // n in [lo, hi) share the binary width w; program length 2 + 2w + 1.
            for (std::size_t w = 1; w < 63; ++w) {
                std::uint64_t lo = w == 1 ? 0 : (std::uint64_t{1} << (w - 1));
                std::uint64_t hi = std::uint64_t{1} << w;
                lo = std::max<std::uint64_t>(lo, sigma.size());
                hi = std::min(hi, c1);
                if (lo >= c1) break;
                if (lo < hi) total += Dyadic(BigInt(hi - lo), 3 + 2 * w);
            }
        }
        return total;
    }

    Dyadic lambda_identity(const BitString& sigma, std::uint64_t t) const {
        return machine::shortlex_index(sigma) < machine::lane_count(1, t) ? Dyadic::pow2neg(sigma.size()) : Dyadic();
    }
};

// ---- Deficiency and profiles ----

// ⌈-log2 μ(σ)⌉, requiring the value to be decidable at the oracle's precision.
inline std::uint64_t neglog_measure(const MeasureOracle& mu, const BitString& sigma, std::uint64_t precision = 256) {
    if (mu.exact) {
        Dyadic v = mu.approx(sigma, 0);
        if (v.is_zero()) throw InvariantViolation("zero-measure prefix " + render_bits(sigma));
        return ceil_neg_log2(v);
    }
    Dyadic v = mu.approx(sigma, precision);
    Dyadic e = Dyadic::pow2neg(precision);
    if (v - e <= Dyadic()) throw BudgetExhausted("measure of " + render_bits(sigma) + " not separated from 0");
    Dyadic hi = v + e;
    if (hi > Dyadic(1)) hi = Dyadic(1);
    std::uint64_t a = ceil_neg_log2(v - e), b = ceil_neg_log2(hi);
    if (a != b) throw BudgetExhausted("undecidable comparison at precision " + std::to_string(precision));
    return a;
}

// ⌈-log2 μ(X↾n)⌉ - k_t(X↾n); nullopt when no program is enumerated yet.
inline std::optional<std::int64_t> deficiency_estimate(const MeasureOracle& mu, const BitString& X, std::uint64_t n,
                                                       const StagedUniversalMachine& U, std::uint64_t t) {
    if (n > X.size()) throw DepthExceeded("deficiency_estimate: prefix too short");
    BitString s = X.substr(0, n);
    std::uint64_t nl = neglog_measure(mu, s);
    Complexity k = k_t(U, s, t);
    if (k.is_infinite()) return std::nullopt;
    return static_cast<std::int64_t>(nl) - static_cast<std::int64_t>(k.value());
}

struct ProfileRow {
    std::uint64_t n;
    Complexity k, ka;
    std::optional<std::uint64_t> neglog_mu;
    std::optional<std::int64_t> deficiency;
};

inline std::vector<ProfileRow> complexity_profile(const BitString& X, const MeasureOracle* mu, const StagedUniversalMachine& U,
                                                  std::uint64_t t, std::uint64_t N) {
    if (N > X.size()) throw DepthExceeded("complexity_profile: N exceeds sequence length");
    std::vector<ProfileRow> rows;
    for (std::uint64_t n = 0; n <= N; ++n) {
        BitString s = X.substr(0, n);
        ProfileRow r{n, k_t(U, s, t), ka_t(U, s, t), std::nullopt, std::nullopt};
        if (mu) {
            Dyadic v = mu->exact ? mu->approx(s, 0) : Dyadic(1);
            if (!mu->exact || !v.is_zero()) {
                r.neglog_mu = neglog_measure(*mu, s);
                if (!r.k.is_infinite())
                    r.deficiency = static_cast<std::int64_t>(*r.neglog_mu) - static_cast<std::int64_t>(r.k.value());
            }
        }
        rows.push_back(r);
    }
    return rows;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
    os << "n,k_t,ka_t,neglog_mu,deficiency\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.k.str() << ',' << r.ka.str() << ',';
        os << (r.neglog_mu ? std::to_string(*r.neglog_mu) : "inf") << ',';
        os << (r.deficiency ? std::to_string(*r.deficiency) : "none") << '\n';
    }
}

// ---- Witness scans ----

enum class WitnessMode { complex, io_complex, anti_complex, io_anti_complex };

inline std::string mode_name(WitnessMode m) {
    switch (m) {
        case WitnessMode::complex: return "complex";
        case WitnessMode::io_complex: return "io-complex";
        case WitnessMode::anti_complex: return "anti-complex";
        case WitnessMode::io_anti_complex: return "io-anti-complex";
    }
    return "?";
}

inline WitnessMode parse_mode(const std::string& s) {
    if (s == "complex") return WitnessMode::complex;
    if (s == "io-complex") return WitnessMode::io_complex;
    if (s == "anti-complex") return WitnessMode::anti_complex;
    if (s == "io-anti-complex") return WitnessMode::io_anti_complex;
    throw ParseError("unknown witness mode: " + s);
}

enum class Verdict { consistent, refuted };

struct WitnessReport {
    WitnessMode mode;
    std::string order;
    std::uint64_t from = 0, to = 0;
    Verdict verdict = Verdict::consistent;
    std::optional<std::uint64_t> refuted_at;
    bool certificate = false;  // true only for upper-bound modes that came out consistent
    std::string note;
    std::vector<Complexity> values;  // per n in [from, to]
};

struct ScanOptions {
    bool use_ka = false;
    std::uint64_t from = 0;
};

// Compares c(X↾f(n)) with n for n in [from, N], c = k_t or ka_t (both upper bounds on K and KA).
inline WitnessReport witness_scan(const BitString& X, const Order& f, const StagedUniversalMachine& U, std::uint64_t t,
                                  std::uint64_t N, WitnessMode mode, ScanOptions opt = {}) {
    WitnessReport r;
    r.mode = mode;
    r.order = f.name();
    r.from = opt.from;
    r.to = N;
    for (std::uint64_t n = opt.from; n <= N; ++n)
        if (f(n) > X.size()) throw DepthExceeded("witness_scan: f(" + std::to_string(n) + ") exceeds prefix length");
    std::optional<std::uint64_t> below, above;  // first n with c < n; first n with c > n
    std::optional<std::uint64_t> some_at_least, some_at_most;
    for (std::uint64_t n = opt.from; n <= N; ++n) {
        BitString s = X.substr(0, f(n));
        Complexity c = opt.use_ka ? ka_t(U, s, t) : k_t(U, s, t);
        r.values.push_back(c);
        auto cn = Complexity::finite(n);
        if (c < cn && !below) below = n;
        if (c > cn && !above) above = n;
        if (c >= cn && !some_at_least) some_at_least = n;
        if (c <= cn && !some_at_most) some_at_most = n;
    }
    const std::string lower = "refutation-only: stage-t values bound the true complexity from above";
    switch (mode) {
        case WitnessMode::complex:
            if (below) r.verdict = Verdict::refuted, r.refuted_at = below;
            r.note = lower;
            break;
        case WitnessMode::io_complex:
            if (!some_at_least) r.verdict = Verdict::refuted, r.refuted_at = N;
            r.note = lower + "; i.o. condition read on the finite range";
            break;
        case WitnessMode::anti_complex:
            if (above) {
                r.verdict = Verdict::refuted;
                r.refuted_at = above;
                r.note = "upper bound not certified at this stage";
            } else {
                r.certificate = true;
                r.note = "certified upper bound on range";
            }
            break;
        case WitnessMode::io_anti_complex:
            if (!some_at_most) {
                r.verdict = Verdict::refuted;
                r.refuted_at = N;
                r.note = "no certified n in range";
            } else {
                r.certificate = true;
                r.note = "certified at n = " + std::to_string(*some_at_most);
            }
            break;
    }
    return r;
}

// ---- Order transforms ----

// m - 2 floor(log2 max(m, 2)) - C at m = h^{-1}(n) - 1, clamped at 0.
inline std::uint64_t k_to_ka_raw(const Order& h, std::uint64_t n, std::uint64_t C = 0) {
    std::uint64_t hinv = order_inverse(h)(n);
    if (hinv == 0) return 0;
    std::uint64_t m = hinv - 1;
    std::uint64_t lg = 0;
    for (std::uint64_t v = std::max<std::uint64_t>(m, 2); v > 1; v >>= 1) ++lg;
    std::uint64_t sub = 2 * lg + C;
    return m > sub ? m - sub : 0;
}

// Running maximum of k_to_ka_raw, which is a valid order; KA is prefix-monotone so the maximum is still a lower bound.
inline Order transform_K_to_KA_witness(const Order& h, std::uint64_t C = 0) {
    return orders::from_function(
        [h, C](std::uint64_t n) {
            std::uint64_t best = 0;
            for (std::uint64_t k = 0; k <= n; ++k) best = std::max(best, k_to_ka_raw(h, k, C));
            return best;
        },
        "k2ka(" + h.name() + ")");
}

enum class InverseKind { ci_i, ci_ii, ci2_i, ci2_ii };

inline InverseKind parse_inverse_kind(const std::string& s) {
    if (s == "ci-i") return InverseKind::ci_i;
    if (s == "ci-ii") return InverseKind::ci_ii;
    if (s == "ci2-i") return InverseKind::ci2_i;
    if (s == "ci2-ii") return InverseKind::ci2_ii;
    throw ParseError("unknown inverse kind: " + s);
}

inline Order inverse_bound_transform(InverseKind kind, const Order& h, const std::optional<Order>& g = std::nullopt) {
    switch (kind) {
        case InverseKind::ci_i: {
            if (!g) throw OrderError("ci-i requires g");
            Order ginv = order_inverse(*g);
            return orders::from_function(
                [h, ginv](std::uint64_t n) {
                    std::uint64_t v = ginv(n);
                    return v == 0 ? 0 : h(v - 1);
                },
                "ci-i(" + h.name() + "," + g->name() + ")");
        }
        case InverseKind::ci_ii:
        case InverseKind::ci2_i: return order_inverse(h);
        case InverseKind::ci2_ii: {
            Order hinv = order_inverse(h);
            return orders::from_function([hinv](std::uint64_t n) { return hinv(n) == 0 ? 0 : hinv(n) - 1; },
                                         "ci2-ii(" + h.name() + ")");
        }
    }
    throw OrderError("unknown inverse kind");
}

// ---- Non-complexity reformulations ----

enum class Reformulation { ka_f_form, ka_n_form };

// f-form: ka(X↾f(n)) <= n; n-form: ka(X↾n) <= f(n); both on [from, N].
inline WitnessReport noncomplexity_reformulation_check(const BitString& X, const Order& f, const StagedUniversalMachine& U,
                                                       std::uint64_t t, std::uint64_t N, Reformulation which,
                                                       std::uint64_t from = 0) {
    if (which == Reformulation::ka_f_form)
        return witness_scan(X, f, U, t, N, WitnessMode::anti_complex, {true, from});
    if (N > X.size()) throw DepthExceeded("noncomplexity_reformulation_check: N exceeds prefix length");
    WitnessReport r;
    r.mode = WitnessMode::anti_complex;
    r.order = f.name();
    r.from = from;
    r.to = N;
    for (std::uint64_t n = from; n <= N; ++n) {
        Complexity c = ka_t(U, X.substr(0, n), t);
        r.values.push_back(c);
        if (c > Complexity::finite(f(n)) && !r.refuted_at) {
            r.verdict = Verdict::refuted;
            r.refuted_at = n;
        }
    }
    r.certificate = r.verdict == Verdict::consistent;
    r.note = r.certificate ? "certified upper bound on range" : "upper bound not certified at this stage";
    return r;
}

// If the f-form holds on [from, N], the n-form with f^{-1} holds for every m <= min(f(N), |X|) with f^{-1}(m) >= from.
inline bool reformulation_bridge_check(const BitString& X, const Order& f, const StagedUniversalMachine& U, std::uint64_t t,
                                       std::uint64_t N, std::uint64_t from = 0) {
    auto fform = noncomplexity_reformulation_check(X, f, U, t, N, Reformulation::ka_f_form, from);
    if (fform.verdict != Verdict::consistent) return true;
    Order finv = order_inverse(f);
    std::uint64_t top = std::min<std::uint64_t>(f(N), X.size());
    for (std::uint64_t m = 0; m <= top; ++m) {
        if (finv(m) < from) continue;
        if (ka_t(U, X.substr(0, m), t) > Complexity::finite(finv(m))) return false;
    }
    return true;
}

// ---- Machine constants ----

struct MachineConstants {
    std::map<std::string, std::int64_t> values;  // c_U plus per-family measurements
    std::int64_t c_U() const {
        auto it = values.find("c_U");
        if (it == values.end()) throw ParseError("machine constants: missing c_U");
        return it->second;
    }
};

// Lines: "machine=<name> key=value ..." after the "machine-constants v1" header.
inline std::map<std::string, MachineConstants> read_machine_constants(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "machine-constants v1") throw ParseError("machine constants: bad header");
    std::map<std::string, MachineConstants> out;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok, name;
        MachineConstants mc;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) throw ParseError("machine constants: bad token " + tok);
            std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "machine") {
                name = val;
                continue;
            }
            try {
                std::size_t used = 0;
                mc.values[key] = std::stoll(val, &used);
                if (used != val.size()) throw ParseError("");
            } catch (const std::exception&) {
                throw ParseError("machine constants: bad value " + tok);
            }
        }
        if (name.empty()) throw ParseError("machine constants: line without machine=");
        out[name] = mc;
    }
    return out;
}

inline MachineConstants load_machine_constants(const std::string& path, const std::string& machine) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    auto all = read_machine_constants(in);
    auto it = all.find(machine);
    if (it == all.end()) throw ParseError("no constants for machine " + machine);
    return it->second;
}

struct Calibration {
    std::int64_t ka_vs_k = 0;  // max ka_t - k_t
    std::int64_t gamma = 0;    // max ka_t(Γ(Z)↾ℓ(n)) - n
    std::uint64_t stage = 0;
    std::int64_t c_U() const { return std::max(ka_vs_k, gamma); }
};

// Measured over strings and Γ sources drawn from the given seeds.
inline Calibration calibrate(const StagedUniversalMachine& U, std::uint64_t t, const std::vector<std::uint64_t>& seeds,
                             std::size_t max_len = 14, std::size_t gamma_blocks = 9) {
    Calibration c;
    c.stage = t;
    bool any = false, any_g = false;
    auto consider = [&](const BitString& s) {
        Complexity k = k_t(U, s, t), ka = ka_t(U, s, t);
        if (k.is_infinite() || ka.is_infinite()) return;
        std::int64_t d = static_cast<std::int64_t>(ka.value()) - static_cast<std::int64_t>(k.value());
        c.ka_vs_k = any ? std::max(c.ka_vs_k, d) : d;
        any = true;
    };
    for (std::size_t n = 0; n <= max_len; ++n) consider(BitString(n, '0'));
    for (auto seed : seeds) {
        std::uint64_t x = seed * 0x9E3779B97F4A7C15ull + 1;
        auto next = [&]() {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            return x;
        };
        for (std::size_t len = 0; len <= max_len; ++len) {
            BitString s;
            for (std::size_t i = 0; i < len; ++i) s.push_back((next() & 1) ? '1' : '0');
            consider(s);
        }
        BitString Z;
        for (std::size_t i = 0; i < gamma_blocks; ++i) Z.push_back((next() & 1) ? '1' : '0');
        auto enc = gamma_encode(Z, machine::gamma_schedule, gamma_blocks);
        for (std::size_t n = 0; n < gamma_blocks; ++n) {
            Complexity ka = ka_t(U, enc.output.substr(0, enc.ell[n]), t);
            if (ka.is_infinite()) continue;
            std::int64_t d = static_cast<std::int64_t>(ka.value()) - static_cast<std::int64_t>(n);
            c.gamma = any_g ? std::max(c.gamma, d) : d;
            any_g = true;
        }
    }
    return c;
}

inline void write_machine_constants(std::ostream& os, const std::string& machine, const Calibration& c) {
    os << "machine-constants v1\n";
    os << "machine=" << machine << " c_U=" << c.c_U() << " ka_vs_k=" << c.ka_vs_k << " gamma=" << c.gamma
       << " stage=" << c.stage << "\n";
}

}  // namespace cantor
