#pragma once

#include <stdexcept>
#include <string>

namespace ifsarc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// A requested computation would exceed the configured point budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Input that violates a precondition (non-contracting ratio, invalid letter, ...).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Geometry that admits no meaningful answer (a = b, apex radius below error, ...).
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// IFS document schema violation, with a locator for the offending field.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& what)
        : Error("schema error at '" + field + "': " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace ifsarc
