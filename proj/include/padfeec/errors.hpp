#pragma once

#include <stdexcept>
#include <string>

namespace padfeec {

// Every library failure carries a short machine-readable kind plus a message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

#define PADFEEC_ERROR(Name)                                                  \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name, what) {}       \
    }

PADFEEC_ERROR(InvalidMatrix);
PADFEEC_ERROR(InvalidGram);
PADFEEC_ERROR(NotClosedRange);
PADFEEC_ERROR(NotNested);
PADFEEC_ERROR(InvalidParameter);
PADFEEC_ERROR(Unsupported);
PADFEEC_ERROR(MeshError);
PADFEEC_ERROR(DegreeOverflow);
PADFEEC_ERROR(DegreeUnderflow);
PADFEEC_ERROR(DegreeMismatch);
PADFEEC_ERROR(ToleranceFailure);
PADFEEC_ERROR(NotAdmissible);
PADFEEC_ERROR(NotAComplex);
PADFEEC_ERROR(SolverFailure);
PADFEEC_ERROR(AssemblyError);

#undef PADFEEC_ERROR

// Raised when a per-cell hypothesis fails; remembers the cell.
class AssumptionViolation : public Error {
public:
    AssumptionViolation(int cell, const std::string& what)
        : Error("AssumptionViolation", "cell " + std::to_string(cell) + ": " + what), cell_(cell) {}
    int cell() const { return cell_; }

private:
    int cell_;
};

}  // namespace padfeec
