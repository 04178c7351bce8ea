#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

// Raised for any parameter or configuration that violates a documented invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A closed form was requested for parameters it does not cover (e.g. eta != 2).
class UnsupportedClosedForm : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Brute-force enumeration refused because the instance would blow up factorially.
class InstanceTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rcm
