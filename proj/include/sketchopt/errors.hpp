#pragma once

#include <stdexcept>
#include <string>

namespace sketchopt {

/// Base of every error raised by the library. `kind()` is the stable name
/// used in CLI diagnostics and service error bodies.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

#define SKETCHOPT_DEFINE_ERROR(Name)                                       \
  class Name : public Error {                                              \
  public:                                                                  \
    explicit Name(const std::string& what) : Error(#Name, what) {}         \
  };

SKETCHOPT_DEFINE_ERROR(IoError)
SKETCHOPT_DEFINE_ERROR(FormatError)
SKETCHOPT_DEFINE_ERROR(ParamError)
SKETCHOPT_DEFINE_ERROR(EmptySceneError)
SKETCHOPT_DEFINE_ERROR(NotFoundError)
SKETCHOPT_DEFINE_ERROR(DegenerateLayoutError)
SKETCHOPT_DEFINE_ERROR(RangeError)
SKETCHOPT_DEFINE_ERROR(ObjectiveError)
SKETCHOPT_DEFINE_ERROR(InfeasibleProblemError)
SKETCHOPT_DEFINE_ERROR(SchemaError)
SKETCHOPT_DEFINE_ERROR(ConfigError)

#undef SKETCHOPT_DEFINE_ERROR

}  // namespace sketchopt
