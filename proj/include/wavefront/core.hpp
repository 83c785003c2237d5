#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace wavefront {

// States of w and v are integer multiples of the grid step; only positions and
// times are floating point.
using GridIndex = std::int64_t;
using WaveId = std::uint32_t;

inline constexpr double kSlopeTolerance = 1e-12;
inline constexpr double kTimeTolerance = 1e-10;
inline constexpr double kPositionTolerance = 1e-9;
inline constexpr double kCheckTolerance = 1e-9;

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class RunawayError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void expects(bool condition, const std::string& what) {
    if (!condition) throw ContractViolation(what);
}

inline int sign_of(GridIndex x) { return (x > 0) - (x < 0); }

}  // namespace wavefront
