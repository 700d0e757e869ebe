#pragma once

#include <stdexcept>
#include <string>

namespace xval {

// Default numeric tolerances, overridable per call where it matters.
struct Tolerances {
    double balance = 1e-9;    // balance / edge-equation residuals
    double rank = 1e-9;       // relative pivot threshold for rank decisions
    double interior = 1e-9;   // strict-positivity margin for interior tests
    double opt = 1e-9;        // first-order / value tolerance for solvers
    double positive = 1e-7;   // threshold for asserting a positive exchange value
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

// Error with a machine-readable kind tag; the CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& detail)
        : std::runtime_error(detail), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

inline Error schema_error(const std::string& json_pointer, const std::string& detail) {
    return Error("SchemaError", json_pointer + ": " + detail);
}

}  // namespace xval
