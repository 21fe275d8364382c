#pragma once

#include <stdexcept>
#include <string>

namespace semico {

// Violated operation precondition (argument order, ranges, kinds).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Finite storage (digit depth, ladder depth/length) too small for the request.
class DepthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bounded searches (anchors, witnesses) that came up empty.
class SearchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed configuration or artifact input; carries a location string.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace semico
