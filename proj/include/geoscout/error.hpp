#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoscout {

// Every library failure derives from Error so callers (the CLI in particular)
// can map families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GEOSCOUT_DEFINE_ERROR(Name)              \
  class Name : public Error {                    \
   public:                                       \
    explicit Name(const std::string& msg)        \
        : Error(std::string(#Name ": ") + msg) {} \
  }

GEOSCOUT_DEFINE_ERROR(IndexError);
GEOSCOUT_DEFINE_ERROR(InvalidArgument);
GEOSCOUT_DEFINE_ERROR(InfeasibleCrop);
GEOSCOUT_DEFINE_ERROR(ImageTooSmall);
GEOSCOUT_DEFINE_ERROR(ReferenceUnavailable);
GEOSCOUT_DEFINE_ERROR(DegenerateReference);
GEOSCOUT_DEFINE_ERROR(DimensionMismatch);
GEOSCOUT_DEFINE_ERROR(EmptyIndex);
GEOSCOUT_DEFINE_ERROR(InsufficientSources);
GEOSCOUT_DEFINE_ERROR(IoError);
GEOSCOUT_DEFINE_ERROR(UnknownTaskKind);
GEOSCOUT_DEFINE_ERROR(UnknownId);
GEOSCOUT_DEFINE_ERROR(DuplicateId);
GEOSCOUT_DEFINE_ERROR(MissingResponse);
GEOSCOUT_DEFINE_ERROR(EmptyInput);

#undef GEOSCOUT_DEFINE_ERROR

// Schema violations in line-oriented files report the 1-based line number.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t line, const std::string& msg)
      : Error("SchemaError: line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace geoscout
