#pragma once

#include <stdexcept>
#include <string>

namespace rotinv {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ZeroMass : Error {
    explicit ZeroMass(const std::string& msg = "image has zero total intensity") : Error(msg) {}
};

struct EmptyImage : Error {
    explicit EmptyImage(const std::string& msg = "no pixel above threshold") : Error(msg) {}
};

struct InvalidIndex : Error {
    explicit InvalidIndex(const std::string& msg) : Error(msg) {}
};

struct NotPowerOfTwo : Error {
    explicit NotPowerOfTwo(const std::string& msg = "length must be a power of two") : Error(msg) {}
};

struct DegenerateHistogram : Error {
    explicit DegenerateHistogram(const std::string& msg = "all pixels fall in one histogram bin") : Error(msg) {}
};

struct EmptyStructuringElement : Error {
    explicit EmptyStructuringElement(const std::string& msg = "structuring element has no active cell") : Error(msg) {}
};

struct DegenerateNormalizer : Error {
    explicit DegenerateNormalizer(const std::string& msg = "normalizing coefficient is (near) zero") : Error(msg) {}
};

struct MissingFile : Error {
    explicit MissingFile(const std::string& path) : Error("missing file: " + path) {}
};

struct MalformedRow : Error {
    int row;  ///< 1-based row index within the offending file
    MalformedRow(int row_, const std::string& msg)
        : Error("row " + std::to_string(row_) + ": " + msg), row(row_) {}
};

struct ZeroSelected : Error {
    explicit ZeroSelected(const std::string& msg = "no item passed the confidence filter") : Error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct RankOutOfRange : Error {
    explicit RankOutOfRange(const std::string& msg) : Error(msg) {}
};

struct DegenerateClass : Error {
    explicit DegenerateClass(const std::string& msg = "class needs at least two examples") : Error(msg) {}
};

struct SingleClass : Error {
    explicit SingleClass(const std::string& msg = "both classes must be present") : Error(msg) {}
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& msg = "non-finite value in input") : Error(msg) {}
};

struct TooFewItems : Error {
    explicit TooFewItems(const std::string& msg) : Error(msg) {}
};

struct InvalidCondition : Error {
    explicit InvalidCondition(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace rotinv
