#pragma once

#include <stdexcept>
#include <string>

namespace packsim {

// Bad user input (malformed profile, trace, flags). CLI exit code 2.
struct InputError : std::runtime_error {
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Internal state violated a model invariant. CLI exit code 3.
struct InvariantError : std::logic_error {
    explicit InvariantError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace packsim
