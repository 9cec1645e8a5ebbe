#pragma once

#include <stdexcept>
#include <string>

namespace selfrocket {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File/structure problems: ragged rows, too few fields, bad container layout.
struct FormatError : Error {
    using Error::Error;
};

// A field that should be a finite real (or a parsable number) is not.
struct ParseError : Error {
    using Error::Error;
};

// Empty file / empty dataset where content is required.
struct EmptyInputError : Error {
    using Error::Error;
};

// A class has too few instances for the requested split scheme.
struct StratificationError : Error {
    using Error::Error;
};

// Dimension mismatches: series length vs plan, row count vs labels, ...
struct ShapeError : Error {
    using Error::Error;
};

// Fewer than two classes present where a classifier must be fit.
struct DegenerateLabelsError : Error {
    using Error::Error;
};

// Invalid configuration values (k < 2, thresh out of range, ...).
struct ConfigError : Error {
    using Error::Error;
};

// Model file is corrupt, truncated, or fails its checksum.
struct IntegrityError : Error {
    using Error::Error;
};

// Model file is intact but from an unsupported format version.
struct IncompatibilityError : Error {
    using Error::Error;
};

// Missing file, unreadable path, failed write.
struct IOError : Error {
    using Error::Error;
};

} // namespace selfrocket
