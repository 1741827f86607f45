#pragma once

#include <stdexcept>
#include <string>

namespace strad {

// Base for every error raised by the library. The CLI maps ConfigError to
// exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class MissingFileError : public Error {
public:
    explicit MissingFileError(const std::string& path)
        : Error("file not found: " + path), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class MissingColumnError : public Error {
public:
    explicit MissingColumnError(const std::string& column)
        : Error("missing column: " + column), column_(column) {}
    const std::string& column() const { return column_; }

private:
    std::string column_;
};

class NonNumericCellError : public Error {
public:
    NonNumericCellError(std::size_t row, const std::string& column, const std::string& cell)
        : Error("non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " + column),
          row_(row), column_(column) {}
    std::size_t row() const { return row_; }
    const std::string& column() const { return column_; }

private:
    std::size_t row_;
    std::string column_;
};

class NonBinaryLabelError : public Error {
public:
    NonBinaryLabelError(std::size_t row, const std::string& cell)
        : Error("label at row " + std::to_string(row) + " is not 0/1: '" + cell + "'"), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class NonFiniteValueError : public Error {
public:
    using Error::Error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// Raised when training produces a non-finite loss, gradient or parameter.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace strad
