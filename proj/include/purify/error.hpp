#pragma once

#include <stdexcept>
#include <string>

namespace purify {

/// A caller violated an operation's precondition.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request exceeds a configured capability (e.g. a level above nu_max).
class CapabilityError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A numerical routine did not reach its accuracy target.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace purify
