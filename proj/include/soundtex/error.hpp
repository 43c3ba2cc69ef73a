#pragma once

#include <stdexcept>
#include <string>

namespace soundtex
{
	/// Base class for every error raised by the library.
	class Error : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	/// An argument violates an operation's precondition.
	class ParameterError : public Error
	{
	public:
		using Error::Error;
	};

	/// Stages of the feature pipeline were wired with incompatible settings.
	class PipelineError : public Error
	{
	public:
		using Error::Error;
	};

	/// Input data is unusable (non-finite values, degenerate sets).
	class DataError : public Error
	{
	public:
		using Error::Error;
	};

	/// A file does not have the expected layout.
	class FormatError : public Error
	{
	public:
		using Error::Error;
	};

	/// A file has the right layout but its payload is damaged or truncated.
	class CorruptionError : public FormatError
	{
	public:
		using FormatError::FormatError;
	};

	class IoError : public Error
	{
	public:
		using Error::Error;
	};
} // namespace soundtex
