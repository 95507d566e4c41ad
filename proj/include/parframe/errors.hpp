#pragma once

#include <stdexcept>
#include <string>

namespace parframe {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The smallest eigenvalue of the frame operator is at or below the
/// tolerance floor: the input is rank deficient or numerically singular.
struct NotAFrame : Error {
    double min_eigenvalue = 0.0;
    int point = -1;  // sample point index when raised bundlewise, -1 otherwise

    explicit NotAFrame(double min_eig, int pt = -1)
        : Error(pt < 0 ? "not a frame: smallest frame-operator eigenvalue " +
                             std::to_string(min_eig) + " is at tolerance floor"
                       : "not a frame at point " + std::to_string(pt) +
                             ": smallest frame-operator eigenvalue " + std::to_string(min_eig)),
          min_eigenvalue(min_eig),
          point(pt) {}
};

/// Input fails the Parseval test at the given tolerance.
struct NotParseval : Error {
    double deviation = 0.0;
    explicit NotParseval(double dev)
        : Error("not a Parseval frame: max deviation from identity " + std::to_string(dev)),
          deviation(dev) {}
};

/// The i-th eigenvalue has multiplicity > 1 at the given tolerance.
struct NotIGeneric : Error {
    int index = 0;
    double gap = 0.0;  // measured normalized gap isolating the index
    int point = -1;
    NotIGeneric(int i, double g, int pt = -1)
        : Error("eigenvalue " + std::to_string(i) + " is not simple" +
                (pt >= 0 ? " at point " + std::to_string(pt) : "") +
                " (normalized gap " + std::to_string(g) + ")"),
          index(i),
          gap(g),
          point(pt) {}
};

struct DomainError : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

/// Bounded resampling did not produce a valid object.
struct GenerationFailed : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    int line = 0;
    ParseError(const std::string& what, int line_number)
        : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
};

/// A point row read from file is not on the unit sphere.
struct NotOnSphere : Error {
    int index = 0;
    explicit NotOnSphere(int point_index, double norm)
        : Error("point " + std::to_string(point_index) + " has norm " + std::to_string(norm) +
                ", not on the unit sphere"),
          index(point_index) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

/// Descriptor flags imply contradictory verdicts.
struct InconsistentDescriptor : Error {
    using Error::Error;
};

/// Exhaustive search hit its tuple budget before finding a witness or
/// exhausting the space.
struct SearchBudgetExceeded : Error {
    using Error::Error;
};

}  // namespace parframe
