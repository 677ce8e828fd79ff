#pragma once

#include "cantor/bitstring.hpp"
#include "cantor/errors.hpp"
#include "cantor/pcf.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cantor {

enum class BlockKind { ones_run, separator, payload };

struct Block {
    BlockKind kind;
    std::size_t begin, length;
    std::size_t index;  // block number n
};

struct BlockEncoding {
    BitString source;
    BitString output;
    std::vector<Block> blocks;
    std::vector<std::uint64_t> g;    // run lengths g(Z, n)
    std::vector<std::uint64_t> j;    // payload lengths per block
    std::vector<std::uint64_t> k;    // output length through payload n
    std::vector<std::uint64_t> ell;  // ℓ(Z, n) for Γ
    std::vector<BitString> tau;
};

using BlockSchedule = std::function<std::uint64_t(std::uint64_t)>;

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    if (a > std::numeric_limits<std::uint64_t>::max() - b) throw BudgetExhausted("encoder length overflow");
    return a + b;
}

inline void emit(BlockEncoding& e, BlockKind kind, const BitString& bits, std::size_t n) {
    e.blocks.push_back({kind, e.output.size(), bits.size(), n});
    e.output += bits;
}

}  // namespace detail

// γ_n = 1^{g(n)} 0 z_n
inline BlockEncoding gamma_encode(const BitString& Z, const BlockSchedule& g, std::size_t n_blocks) {
    if (Z.size() < n_blocks) throw DepthExceeded("gamma_encode: source prefix too short");
    BlockEncoding e;
    e.source = Z.substr(0, n_blocks);
    std::uint64_t ell = 0;
    for (std::size_t n = 0; n < n_blocks; ++n) {
        std::uint64_t gn = g(n);
        if (gn > (std::uint64_t{1} << 32)) throw BudgetExhausted("gamma_encode: run length too large to materialize");
        e.g.push_back(gn);
        detail::emit(e, BlockKind::ones_run, BitString(gn, '1'), n);
        detail::emit(e, BlockKind::separator, "0", n);
        detail::emit(e, BlockKind::payload, Z.substr(n, 1), n);
        ell = detail::checked_add(ell, gn + 2);
        e.ell.push_back(ell);
        e.j.push_back(1);
        e.k.push_back(e.output.size());
        e.tau.push_back(Z.substr(n, 1));
    }
    return e;
}

// ℓ(Z, n) = 2(n+1) + Σ_{i≤n} g(i)
inline std::uint64_t gamma_length(const BlockSchedule& g, std::uint64_t n) {
    std::uint64_t s = 2 * (n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) s = detail::checked_add(s, g(i));
    return s;
}

struct GammaParse {
    BitString z;               // payload bits lying inside σ
    std::uint64_t last_block;  // σ ⪯ Γ(ρ) iff |ρ| ≥ last_block + 1 and z ⪯ ρ
};

// nullopt when σ is not a prefix of any Γ output.
inline std::optional<GammaParse> gamma_parse(const BitString& sigma, const BlockSchedule& g) {
    GammaParse r{"", 0};
    std::size_t pos = 0;
    for (std::uint64_t n = 0;; ++n) {
        if (pos == sigma.size()) {
            r.last_block = n == 0 ? 0 : n - 1;
            return r;
        }
        std::uint64_t gn = g(n);
        std::size_t ones = 0;
        while (ones < gn && pos < sigma.size()) {
            if (sigma[pos] != '1') return std::nullopt;
            ++ones;
            ++pos;
        }
        if (pos == sigma.size()) {
            r.last_block = n;
            return r;
        }
        if (sigma[pos++] != '0') return std::nullopt;
        if (pos == sigma.size()) {
            r.last_block = n;
            return r;
        }
        r.z.push_back(sigma[pos++]);
    }
}

// Payload bits of complete blocks; ParseError if Y does not follow the block grammar.
inline BitString gamma_decode(const BitString& Y, const BlockSchedule& g) {
    auto p = gamma_parse(Y, g);
    if (!p) throw ParseError("gamma_decode: input is not a Γ output prefix");
    return p->z;
}

// Ξ for the i.o. complex construction; f(n) is the halting time of φ_index(n).
inline BlockEncoding xi_encode_ioc(const BitString& Z, const StepPCF& p, std::size_t n_blocks, std::uint64_t max_steps,
                                   std::uint64_t index = 0) {
    auto f = [&](std::uint64_t n) {
        auto t = p.halting_time(index, n);
        if (!t || *t > max_steps) throw BudgetExhausted("xi_encode_ioc: φ(" + std::to_string(n) + ") not halted within budget");
        return *t;
    };
    BlockEncoding e;
    std::uint64_t consumed = 0;
    for (std::size_t n = 0; n < n_blocks; ++n) {
        std::uint64_t gn, jn;
        if (n == 0) {
            gn = f(0);
            jn = detail::checked_add(gn, 1);
        } else {
            gn = f(e.j.back());
            jn = 0;
            e.g.push_back(gn);
            for (std::size_t i = 0; i <= n; ++i) {
                if (n - i >= 63) throw BudgetExhausted("xi_encode_ioc: j overflow");
                std::uint64_t term = (e.g[i] + 1) << (n - i);
                if ((term >> (n - i)) != e.g[i] + 1) throw BudgetExhausted("xi_encode_ioc: j overflow");
                jn = detail::checked_add(jn, term);
            }
            e.g.pop_back();
        }
        if (detail::checked_add(consumed, jn) > Z.size()) throw DepthExceeded("xi_encode_ioc: source prefix too short");
        BitString tau = Z.substr(consumed, jn);
        consumed += jn;
        e.g.push_back(gn);
        e.j.push_back(jn);
        e.tau.push_back(tau);
        detail::emit(e, BlockKind::ones_run, BitString(gn, '1'), n);
        detail::emit(e, BlockKind::separator, "0", n);
        detail::emit(e, BlockKind::payload, tau, n);
        e.k.push_back(e.output.size());
    }
    e.source = Z.substr(0, consumed);
    return e;
}

// Each payload is as long as everything before it in Y.
inline BitString xi_decode_ioc(const BitString& Y) {
    BitString z;
    std::size_t pos = 0;
    while (pos < Y.size()) {
        std::size_t q = Y.find('0', pos);
        if (q == BitString::npos) break;
        std::size_t len = q + 1;
        if (q + 1 + len > Y.size()) break;
        z += Y.substr(q + 1, len);
        pos = q + 1 + len;
    }
    return z;
}

struct ClaimReport {
    bool ok = true;
    std::optional<std::size_t> witness;
    explicit operator bool() const { return ok; }
};

// |τ_k| (from the j-table) against |σ_k| re-derived from the g- and j-tables.
inline ClaimReport claim_sigma_tau_check(const BlockEncoding& e, std::size_t K) {
    if (e.g.size() < K + 1 || e.j.size() < K + 1) throw DepthExceeded("claim_sigma_tau_check: not enough blocks");
    std::uint64_t sigma = 0;
    for (std::size_t k = 0; k <= K; ++k) {
        sigma += e.g[k] + 1;
        if (e.j[k] != sigma) return {false, k};
        sigma += e.j[k];
    }
    return {};
}

// Cumulative payload J_n = Σ_{i≤n} j_i against k_n / 2.
inline bool halfweight_check(const BlockEncoding& e, std::size_t n) {
    if (e.j.size() < n + 1 || e.k.size() < n + 1) throw DepthExceeded("halfweight_check: tables too short");
    std::uint64_t J = 0;
    for (std::size_t i = 0; i <= n; ++i) J += e.j[i];
    return 2 * J >= e.k[n];
}

// Re-derives the output from the tables; false on any mismatch.
inline bool encoding_consistent(const BlockEncoding& e) {
    BitString out;
    for (std::size_t n = 0; n < e.g.size(); ++n) {
        out += BitString(e.g[n], '1');
        out += '0';
        if (e.tau[n].size() != e.j[n]) return false;
        out += e.tau[n];
        if (out.size() != e.k[n]) return false;
    }
    return out == e.output;
}

}  // namespace cantor
