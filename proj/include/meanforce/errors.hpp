// errors.hpp - exception hierarchy shared by all modules

#pragma once

#include <stdexcept>
#include <string>

namespace meanforce {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonHermitianInput : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };
struct QuadratureNotConverged : Error { using Error::Error; };
struct IntegralDiverges : Error { using Error::Error; };
struct AmbiguousGapClustering : Error { using Error::Error; };
struct DegenerateGroundState : Error { using Error::Error; };
struct DimensionCap : Error { using Error::Error; };
struct UnsupportedCombination : Error { using Error::Error; };

}  // namespace meanforce
