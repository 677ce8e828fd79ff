#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cantor {

class OrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Non-decreasing unbounded map N -> N with g(0) = 0 and a witness N |-> k such that g(k) >= N.
class Order {
public:
    using Fn = std::function<std::uint64_t(std::uint64_t)>;

    Order(Fn eval, Fn witness, std::string name = "order")
        : eval_(std::make_shared<Fn>(std::move(eval))),
          witness_(std::make_shared<Fn>(std::move(witness))),
          name_(std::move(name)) {
        if ((*eval_)(0) != 0) throw OrderError(name_ + ": order must satisfy g(0) = 0");
    }

    std::uint64_t operator()(std::uint64_t n) const { return (*eval_)(n); }
    std::uint64_t witness(std::uint64_t N) const { return (*witness_)(N); }
    const std::string& name() const { return name_; }

    // Throws OrderError if monotonicity or the witness fails on [0, N].
    void validate(std::uint64_t N) const {
        std::uint64_t prev = (*this)(0);
        for (std::uint64_t n = 1; n <= N; ++n) {
            std::uint64_t v = (*this)(n);
            if (v < prev) throw OrderError(name_ + ": decreases at " + std::to_string(n));
            prev = v;
        }
        for (std::uint64_t m = 0; m <= N; ++m)
            if ((*this)(witness(m)) < m) throw OrderError(name_ + ": witness fails at " + std::to_string(m));
    }

private:
    std::shared_ptr<const Fn> eval_;
    std::shared_ptr<const Fn> witness_;
    std::string name_;
};

namespace orders {

inline Order identity() {
    return Order([](std::uint64_t n) { return n; }, [](std::uint64_t n) { return n; }, "identity");
}

// n |-> floor(a*n / b)
inline Order linear(std::uint64_t a, std::uint64_t b = 1) {
    if (a == 0 || b == 0) throw OrderError("linear: a and b must be positive");
    return Order([a, b](std::uint64_t n) { return a * n / b; },
                 [a, b](std::uint64_t N) { return (N * b + a - 1) / a; },
                 "linear:" + std::to_string(a) + "," + std::to_string(b));
}

// n |-> floor(log2(n+1))
inline Order log2floor_plus() {
    return Order(
        [](std::uint64_t n) {
            std::uint64_t r = 0;
            for (std::uint64_t m = n + 1; m > 1; m >>= 1) ++r;
            return r;
        },
        [](std::uint64_t N) {
            if (N >= 63) throw OrderError("log2floor+: witness overflow");
            return (std::uint64_t{1} << N) - 1;
        },
        "log2floor+");
}

// Finite table, extrapolated past the end with the last step (at least 1).
inline Order table(std::vector<std::uint64_t> values) {
    if (values.empty()) throw OrderError("table: empty");
    if (values[0] != 0) throw OrderError("table: order must satisfy g(0) = 0");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1]) throw OrderError("table: not non-decreasing");
    std::uint64_t step = values.size() >= 2 ? values.back() - values[values.size() - 2] : 1;
    if (step == 0) step = 1;
    auto v = std::make_shared<const std::vector<std::uint64_t>>(std::move(values));
    auto eval = [v, step](std::uint64_t n) {
        if (n < v->size()) return (*v)[n];
        return v->back() + (n - (v->size() - 1)) * step;
    };
    auto wit = [v, step, eval](std::uint64_t N) {
        for (std::uint64_t k = 0; k < v->size(); ++k)
            if ((*v)[k] >= N) return k;
        std::uint64_t last = v->size() - 1;
        return last + (N - v->back() + step - 1) / step;
    };
    std::string name = "table:";
    for (std::size_t i = 0; i < v->size(); ++i) name += (i ? "," : "") + std::to_string((*v)[i]);
    return Order(eval, wit, name);
}

// Generic monotone function with witness found by doubling search.
inline Order from_function(Order::Fn f, std::string name = "fn") {
    auto fp = std::make_shared<const Order::Fn>(std::move(f));
    return Order([fp](std::uint64_t n) { return (*fp)(n); },
                 [fp](std::uint64_t N) {
                     std::uint64_t hi = 1;
                     while ((*fp)(hi) < N) hi <<= 1;
                     std::uint64_t lo = 0;
                     while (lo < hi) {
                         std::uint64_t mid = lo + (hi - lo) / 2;
                         if ((*fp)(mid) >= N) hi = mid; else lo = mid + 1;
                     }
                     return lo;
                 },
                 std::move(name));
}

}  // namespace orders

// g^{-1}(n) = min{k : g(k) >= n}
inline Order order_inverse(const Order& g) {
    auto eval = [g](std::uint64_t n) {
        std::uint64_t lo = 0, hi = g.witness(n);
        while (lo < hi) {
            std::uint64_t mid = lo + (hi - lo) / 2;
            if (g(mid) >= n) hi = mid; else lo = mid + 1;
        }
        return lo;
    };
    auto wit = [g](std::uint64_t N) { return N == 0 ? std::uint64_t{0} : g(N - 1) + 1; };
    return Order(eval, wit, "inverse(" + g.name() + ")");
}

struct LemmaCheck {
    bool hypothesis = true;
    bool conclusion = true;
    std::optional<std::uint64_t> hypothesis_failure;  // first n violating the hypothesis
    std::optional<std::uint64_t> conclusion_failure;  // first k violating the conclusion
    explicit operator bool() const { return conclusion; }
};

// Hypothesis g(n) <= f(n) < g(n+c) for n <= N; conclusion g^{-1}(k)-c <= f^{-1}(k) <= g^{-1}(k) for k <= N.
inline LemmaCheck check_inverse_sandwich(const Order& f, const Order& g, std::uint64_t c, std::uint64_t N) {
    LemmaCheck r;
    for (std::uint64_t n = 0; n <= N; ++n) {
        std::uint64_t fn = f(n);
        if (!(g(n) <= fn && fn < g(n + c))) {
            r.hypothesis = false;
            r.hypothesis_failure = n;
            break;
        }
    }
    Order fi = order_inverse(f), gi = order_inverse(g);
    for (std::uint64_t k = 0; k <= N; ++k) {
        std::uint64_t a = gi(k), b = fi(k);
        if (!(a <= b + c && b <= a)) {
            r.conclusion = false;
            r.conclusion_failure = k;
            break;
        }
    }
    return r;
}

// Hypothesis f(n) <= g(n)+c for n <= N; conclusion g^{-1}(k) <= f^{-1}(k+c) for k <= N.
inline LemmaCheck check_inverse_shift(const Order& f, const Order& g, std::uint64_t c, std::uint64_t N) {
    LemmaCheck r;
    for (std::uint64_t n = 0; n <= N; ++n) {
        if (!(f(n) <= g(n) + c)) {
            r.hypothesis = false;
            r.hypothesis_failure = n;
            break;
        }
    }
    Order fi = order_inverse(f), gi = order_inverse(g);
    for (std::uint64_t k = 0; k <= N; ++k) {
        if (!(gi(k) <= fi(k + c))) {
            r.conclusion = false;
            r.conclusion_failure = k;
            break;
        }
    }
    return r;
}

inline bool finite_domination(const Order& f, const Order& g, std::uint64_t from, std::uint64_t to) {
    if (from > to) throw std::invalid_argument("finite_domination: from > to");
    for (std::uint64_t n = from; n <= to; ++n)
        if (f(n) > g(n)) return false;
    return true;
}

// Text form order:<kind>:<params>, kinds identity, log2floor+, linear:a[,b], table:v0,v1,...
inline Order parse_order(const std::string& text) {
    std::string s = text;
    if (s.rfind("order:", 0) == 0) s = s.substr(6);
    auto colon = s.find(':');
    std::string kind = s.substr(0, colon);
    std::string params = colon == std::string::npos ? "" : s.substr(colon + 1);
    auto numbers = [&]() {
        std::vector<std::uint64_t> out;
        std::size_t pos = 0;
        while (pos <= params.size()) {
            auto comma = params.find(',', pos);
            std::string tok = params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
                throw OrderError("bad order parameters: " + text);
            out.push_back(std::stoull(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return out;
    };
    if (kind == "identity" && params.empty()) return orders::identity();
    if (kind == "log2floor+" && params.empty()) return orders::log2floor_plus();
    if (kind == "linear") {
        auto v = numbers();
        if (v.size() == 1) return orders::linear(v[0]);
        if (v.size() == 2) return orders::linear(v[0], v[1]);
        throw OrderError("linear takes a or a,b: " + text);
    }
    if (kind == "table") return orders::table(numbers());
    throw OrderError("unknown order: " + text);
}

}  // namespace cantor
