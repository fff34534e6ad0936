#pragma once

#include <stdexcept>
#include <string>

namespace iwg {

enum class ErrorKind {
    degenerate_triangle,
    multiple_crossings,
    rank_deficient,
    ill_conditioned,
    singular_gram,
    inconsistent_constraint,
    not_positive_definite,
    no_convergence,
    non_positive_error,
    invalid_config,
};

inline const char* to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::degenerate_triangle: return "DegenerateTriangle";
    case ErrorKind::multiple_crossings: return "MultipleCrossings";
    case ErrorKind::rank_deficient: return "RankDeficient";
    case ErrorKind::ill_conditioned: return "IllConditioned";
    case ErrorKind::singular_gram: return "SingularGram";
    case ErrorKind::inconsistent_constraint: return "InconsistentConstraint";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::non_positive_error: return "NonPositiveError";
    case ErrorKind::invalid_config: return "InvalidConfig";
    }
    return "Unknown";
}

/// Exception carrying a machine-checkable error kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
    {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace iwg
