#pragma once

#include <stdexcept>
#include <string>

namespace cantor {

// Malformed input text or file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bounded search ran out of budget.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An object failed its declared invariants.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A query needed data beyond what the object holds (tree depth, prefix length).
class DepthExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact search found nothing in range.
class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cantor
