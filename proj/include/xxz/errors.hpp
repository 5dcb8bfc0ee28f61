#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xxz {

/// Base of every domain error raised by the library. `name()` is the stable
/// identifier the CLI prints on failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* name() const noexcept = 0;
};

#define XXZ_DEFINE_ERROR(Type)                                      \
  class Type : public Error {                                       \
   public:                                                          \
    using Error::Error;                                             \
    const char* name() const noexcept override { return #Type; }    \
  };

XXZ_DEFINE_ERROR(SupportOutOfRange)
XXZ_DEFINE_ERROR(WindowTooWide)
XXZ_DEFINE_ERROR(NotTelescoping)
XXZ_DEFINE_ERROR(InvalidResonance)
XXZ_DEFINE_ERROR(DegenerateFit)
XXZ_DEFINE_ERROR(SizeTooLarge)
XXZ_DEFINE_ERROR(NotConserved)
XXZ_DEFINE_ERROR(InvalidArgument)

#undef XXZ_DEFINE_ERROR

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}
  const char* name() const noexcept override { return "ParseError"; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace xxz
