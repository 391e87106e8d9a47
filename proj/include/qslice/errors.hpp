#pragma once

#include <stdexcept>
#include <string>

namespace qslice {

// Error taxonomy mirrored by the CLI exit codes: input 2, budget 3, internal 4.

class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Violated internal consistency (a counting identity failed, a witness did not
// verify). Always a bug, never a user problem.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qslice
