#pragma once

#include <stdexcept>
#include <string>

namespace motifcrf {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// CSV row failed column-count or type parsing; carries the 1-based line number.
class MalformedRow : public Error {
public:
    MalformedRow(const std::string& file, long line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

/// A motif row references a note_id absent from the notes table.
class DanglingReference : public Error {
public:
    using Error::Error;
};

/// Two note rows share a note_id within one movement.
class DuplicateNoteId : public Error {
public:
    using Error::Error;
};

class EmptyMovement : public Error {
public:
    using Error::Error;
};

class EmptySequence : public Error {
public:
    using Error::Error;
};

/// No harmony event covers a note onset.
class HarmonyGap : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Numeric blow-up inside objective/gradient evaluation.
class NonFiniteValue : public Error {
public:
    using Error::Error;
};

/// Hessian not invertible at the requested tolerance; carries its
/// smallest-magnitude eigenvalue so the caller can decide on jitter.
class SingularHessian : public Error {
public:
    SingularHessian(const std::string& msg, double smallest_eigenvalue)
        : Error(msg), smallest_eigenvalue_(smallest_eigenvalue) {}
    double smallest_eigenvalue() const { return smallest_eigenvalue_; }

private:
    double smallest_eigenvalue_ = 0.0;
};

/// A model refit inside a permutation replicate failed.
class FitFailure : public Error {
public:
    using Error::Error;
};

/// A pipeline stage was invoked before its input artifacts exist.
class MissingArtifact : public Error {
public:
    using Error::Error;
};

class EmptyData : public Error {
public:
    using Error::Error;
};

}  // namespace motifcrf
