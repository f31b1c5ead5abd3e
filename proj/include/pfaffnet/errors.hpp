#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pfaffnet {

/// A point left the open interval on which an activation is real-analytic.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dimensions of weights, points, boxes or grids do not agree.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A configuration or data document is malformed.
class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A grid, complex or jet would exceed the configured size limits.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation failed at a specific grid cell.
class CellEvaluationError : public std::runtime_error {
public:
    CellEvaluationError(std::size_t cell, const std::string& what)
        : std::runtime_error("cell " + std::to_string(cell) + ": " + what), cell_(cell) {}

    std::size_t cell() const noexcept { return cell_; }

private:
    std::size_t cell_;
};

} // namespace pfaffnet
