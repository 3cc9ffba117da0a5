#pragma once

#include <stdexcept>
#include <string>

namespace fringelab {

/// Base for every error the library raises. `exit_code()` is the CLI status.
class Error : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
	virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
public:
	using Error::Error;
	int exit_code() const noexcept override { return 2; }
};

class IoError : public Error {
public:
	using Error::Error;
	int exit_code() const noexcept override { return 3; }
};

class DegenerateInputError : public Error {
public:
	using Error::Error;
	int exit_code() const noexcept override { return 4; }
};

class NumericalError : public Error {
public:
	using Error::Error;
	int exit_code() const noexcept override { return 5; }
};

// Mismatched grids between two operands; a programming error, not user input.
class ShapeError : public Error {
public:
	using Error::Error;
	int exit_code() const noexcept override { return 5; }
};

} // namespace fringelab
