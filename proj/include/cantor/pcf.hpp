#pragma once

#include "cantor/errors.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace cantor {

// Step-indexed family φ_i: halting time per (i, n), nullopt if φ_i(n) never halts; value once halted.
struct StepPCF {
    std::function<std::optional<std::uint64_t>(std::uint64_t, std::uint64_t)> halting_time;
    std::function<std::uint64_t(std::uint64_t, std::uint64_t)> value;
    std::string name = "pcf";

    // Halted(value) at step s, or nullopt while running.
    std::optional<std::uint64_t> eval(std::uint64_t i, std::uint64_t n, std::uint64_t s) const {
        auto t = halting_time(i, n);
        if (t && *t <= s) return value(i, n);
        return std::nullopt;
    }

    bool halts_exactly_at(std::uint64_t i, std::uint64_t n, std::uint64_t s) const {
        auto t = halting_time(i, n);
        return t && *t == s;
    }
};

struct PcfViolation {
    char convention;  // 'M' monotone, 'A'..'D'
    std::uint64_t i, n;
    std::string message;
};

// Conventions A-D and step monotonicity over i <= I, n <= N, s <= S.
inline std::optional<PcfViolation> pcf_violation(const StepPCF& p, std::uint64_t I, std::uint64_t N, std::uint64_t S) {
    for (std::uint64_t i = 0; i <= I; ++i) {
        std::optional<std::uint64_t> prev_time;
        bool prev_halts = true;
        for (std::uint64_t n = 0; n <= N; ++n) {
            std::optional<std::uint64_t> first, val;
            for (std::uint64_t s = 0; s <= S; ++s) {
                auto v = p.eval(i, n, s);
                if (first && (!v || *v != *val)) return PcfViolation{'M', i, n, "halted result changed at step " + std::to_string(s)};
                if (v && !first) {
                    first = s;
                    val = v;
                }
            }
            if (first) {
                if (*val > *first) return PcfViolation{'A', i, n, "value exceeds halting time"};
                if (n > *first) return PcfViolation{'C', i, n, "argument exceeds halting time"};
                if (!prev_halts) return PcfViolation{'D', i, n, "halts while a smaller argument diverges"};
                if (prev_time && *first <= *prev_time)
                    return PcfViolation{'B', i, n, "halting time not strictly greater than for n-1"};
            }
            prev_halts = first.has_value();
            prev_time = first;
        }
    }
    return std::nullopt;
}

inline bool pcf_validate(const StepPCF& p, std::uint64_t I, std::uint64_t N, std::uint64_t S) {
    return !pcf_violation(p, I, N, S).has_value();
}

namespace pcf {

enum class Values { time, argument };

// Closed-form schedule t(i, n); indices in `never` or >= indices_limit never halt.
inline StepPCF from_schedule(std::function<std::uint64_t(std::uint64_t, std::uint64_t)> t, std::set<std::uint64_t> never = {},
                             std::optional<std::uint64_t> indices_limit = std::nullopt, Values values = Values::time,
                             std::string name = "schedule") {
    StepPCF p;
    p.name = std::move(name);
    p.halting_time = [t, never, indices_limit](std::uint64_t i, std::uint64_t n) -> std::optional<std::uint64_t> {
        if (never.count(i) || (indices_limit && i >= *indices_limit)) return std::nullopt;
        return t(i, n);
    };
    p.value = [t, values](std::uint64_t i, std::uint64_t n) { return values == Values::time ? t(i, n) : n; };
    return p;
}

inline StepPCF linear(std::set<std::uint64_t> never = {}, std::optional<std::uint64_t> limit = std::nullopt,
                      Values values = Values::time) {
    return from_schedule([](std::uint64_t i, std::uint64_t n) { return (n + 1) * (i + 2); }, std::move(never), limit,
                         values, "linear");
}

inline StepPCF pow2(std::set<std::uint64_t> never = {}, std::optional<std::uint64_t> limit = std::nullopt,
                    Values values = Values::time) {
    return from_schedule(
        [](std::uint64_t i, std::uint64_t n) {
            if (n >= 62) throw BudgetExhausted("pow2 schedule overflow");
            return (std::uint64_t{1} << n) + i;
        },
        std::move(never), limit, values, "pow2");
}

inline StepPCF never_halting() {
    StepPCF p;
    p.name = "never";
    p.halting_time = [](std::uint64_t, std::uint64_t) -> std::optional<std::uint64_t> { return std::nullopt; };
    p.value = [](std::uint64_t, std::uint64_t) -> std::uint64_t { return 0; };
    return p;
}

// sched:<linear|pow2|never>[:never=a,b][:indices=k][:values=time|arg]
inline StepPCF parse_schedule(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    if (parts.size() < 2 || parts[0] != "sched") throw ParseError("bad schedule spec: " + spec);
    std::set<std::uint64_t> never;
    std::optional<std::uint64_t> limit;
    Values values = Values::time;
    auto number = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("bad number in schedule spec: " + spec);
        return std::stoull(s);
    };
    for (std::size_t k = 2; k < parts.size(); ++k) {
        const auto& opt = parts[k];
        auto eq = opt.find('=');
        if (eq == std::string::npos) throw ParseError("bad schedule option: " + opt);
        std::string key = opt.substr(0, eq), val = opt.substr(eq + 1);
        if (key == "never") {
            std::stringstream vs(val);
            for (std::string x; std::getline(vs, x, ',');) never.insert(number(x));
        } else if (key == "indices") {
            limit = number(val);
        } else if (key == "values") {
            if (val == "time") values = Values::time;
            else if (val == "arg") values = Values::argument;
            else throw ParseError("bad values option: " + val);
        } else {
            throw ParseError("unknown schedule option: " + key);
        }
    }
    if (parts[1] == "linear") return linear(never, limit, values);
    if (parts[1] == "pow2") return pow2(never, limit, values);
    if (parts[1] == "never") return never_halting();
    throw ParseError("unknown schedule kind: " + parts[1]);
}

}  // namespace pcf

}  // namespace cantor
