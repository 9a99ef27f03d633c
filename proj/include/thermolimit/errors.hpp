#pragma once

#include <stdexcept>
#include <string>

namespace thermolimit {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

struct NotHermitian : Error {
    explicit NotHermitian(const std::string& what) : Error(what) {}
};

struct BadFactorIndex : Error {
    explicit BadFactorIndex(const std::string& what) : Error(what) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what) : Error(what) {}
};

// Resource cap exceeded (brute-force paths only).
struct TooLarge : Error {
    explicit TooLarge(const std::string& what) : Error(what) {}
};

struct DegenerateVariance : Error {
    explicit DegenerateVariance(const std::string& what) : Error(what) {}
};

struct DegenerateSpectrum : Error {
    explicit DegenerateSpectrum(const std::string& what) : Error(what) {}
};

struct UndefinedTimescale : Error {
    explicit UndefinedTimescale(const std::string& what) : Error(what) {}
};

struct UnrealizableBathValues : Error {
    explicit UnrealizableBathValues(const std::string& what) : Error(what) {}
};

struct EmptySeries : Error {
    explicit EmptySeries(const std::string& what) : Error(what) {}
};

struct InadequateCutoff : Error {
    explicit InadequateCutoff(const std::string& what) : Error(what) {}
};

struct IoFailure : Error {
    explicit IoFailure(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace thermolimit
