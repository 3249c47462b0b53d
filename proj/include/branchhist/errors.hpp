#pragma once

#include <stdexcept>
#include <string>

namespace branchhist {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Operand shapes do not match (non-square, mixed dimensions, wrong sizes).
class DimensionError : public Error {
public:
    using Error::Error;
};

// A matrix failed the algebraic invariant of the type it was wrapped in
// (projector, decomposition, density matrix, unitary, Hermitian).
class InvariantError : public Error {
public:
    using Error::Error;
};

// Propagator requested for a time the provider does not cover.
class TimeRangeError : public Error {
public:
    using Error::Error;
};

// Histories that cannot be summed into a single history.
class SummationError : public Error {
public:
    using Error::Error;
};

// Summing two histories of a branching family that do not share their
// prefix. There is no history that represents such a sum.
class TransBranchError : public SummationError {
public:
    using SummationError::SummationError;
};

// History sequences that do not share slot times cannot live in one
// history Hilbert space.
class NotEmbeddableError : public Error {
public:
    using Error::Error;
};

}  // namespace branchhist
