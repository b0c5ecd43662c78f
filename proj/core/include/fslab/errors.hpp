#pragma once

#include <stdexcept>
#include <string>

namespace fslab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
    // Numerical failures map to a different CLI exit code than bad input.
    virtual bool numerical() const noexcept { return false; }
};

#define FSLAB_DECLARE_ERROR(Name, Kind, IsNumerical)                         \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(what) {}              \
        const char* kind() const noexcept override { return Kind; }          \
        bool numerical() const noexcept override { return IsNumerical; }     \
    };

FSLAB_DECLARE_ERROR(ParameterError, "parameter", false)
FSLAB_DECLARE_ERROR(ConfigError, "config", false)
FSLAB_DECLARE_ERROR(ShapeError, "shape", false)
FSLAB_DECLARE_ERROR(DegenerateCaseError, "degenerate_case", false)
FSLAB_DECLARE_ERROR(RegionError, "region", true)
FSLAB_DECLARE_ERROR(BranchError, "branch", true)
FSLAB_DECLARE_ERROR(SingularityError, "singularity", true)
FSLAB_DECLARE_ERROR(SearchFailure, "search_failure", true)
FSLAB_DECLARE_ERROR(QuadratureError, "quadrature", true)
FSLAB_DECLARE_ERROR(ContourError, "contour", true)
FSLAB_DECLARE_ERROR(DivergenceError, "divergence", true)
FSLAB_DECLARE_ERROR(InterpolationError, "interpolation", true)

#undef FSLAB_DECLARE_ERROR

}  // namespace fslab
