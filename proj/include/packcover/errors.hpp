#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace packcover {

/// Invalid run configuration (bad parameter combination, impossible request).
class ConfigurationError : public std::runtime_error {
public:
    explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

/// Constants fail their consistency audit; carries the failing check's label.
class CalibrationError : public std::runtime_error {
public:
    CalibrationError(std::string check, const std::string& what)
        : std::runtime_error("calibration check (" + check + "): " + what),
          check_(std::move(check)) {}

    const std::string& check() const { return check_; }

private:
    std::string check_;
};

/// A structural invariant that should hold by construction was observed to fail.
class InvariantViolation : public std::logic_error {
public:
    explicit InvariantViolation(const std::string& what) : std::logic_error(what) {}
};

/// Refinement produced more tiles than the configured budget allows.
class TileBudgetExceeded : public std::runtime_error {
public:
    TileBudgetExceeded(std::size_t placed, std::size_t budget)
        : std::runtime_error("tile budget exceeded: placed " + std::to_string(placed) +
                             " of allowed " + std::to_string(budget)),
          tiles_placed(placed),
          tile_budget(budget) {}

    std::size_t tiles_placed;
    std::size_t tile_budget;
};

}  // namespace packcover
