#ifndef ISCAT_ERRORS_HPP
#define ISCAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace iscat {

// Named failure conditions of the numerical procedures.  Each maps to a
// distinct condition a caller may want to branch on; the CLI maps all of
// them to the "numerical breakdown" exit code.
enum class Err {
    NonFiniteSample,
    GridTooCoarse,
    IterationDivergence,
    KappaMaxTooSmall,
    BranchAmbiguity,
    IndexMismatch,
    TailTooHeavy,
    SingularFredholm,
    DiagonalTooNoisy,
    PronyIllConditioned,
    TailDivergence,
    FitNotConverged,
    PoleOnGrid,
    PeelingStalled,
    GNotPositive,
    OrderOverflow,
    MatchingSingular,
    FredholmBreakdown,
    BracketingFailure,
    BasisIllConditioned,
    ContractionViolated,
};

const char* to_string(Err e);

class SolverError : public std::runtime_error {
  public:
    SolverError(Err code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    Err code() const { return code_; }

  private:
    Err code_;
};

// Bad user input (files, flags, malformed data) as opposed to a numerical
// breakdown inside a solver.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Scattering data failed the admissibility conditions.
class CharacterizationFailure : public std::runtime_error {
  public:
    explicit CharacterizationFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace iscat

#endif
