#pragma once

#include <stdexcept>
#include <string>

namespace subeik {

/// Base class of every numerical or configuration failure raised by the
/// library. `kind()` is the stable error name echoed by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SUBEIK_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

SUBEIK_DEFINE_ERROR(DegenerateCovector);
SUBEIK_DEFINE_ERROR(DepthExceeded);
SUBEIK_DEFINE_ERROR(NotOnBoundary);
SUBEIK_DEFINE_ERROR(DegenerateGradient);
SUBEIK_DEFINE_ERROR(EmptyBoundary);
SUBEIK_DEFINE_ERROR(NotConverged);
SUBEIK_DEFINE_ERROR(CharacteristicLaunch);
SUBEIK_DEFINE_ERROR(StencilClipped);
SUBEIK_DEFINE_ERROR(MeshMismatch);
SUBEIK_DEFINE_ERROR(EndpointOffBoundary);
SUBEIK_DEFINE_ERROR(ConfigError);

#undef SUBEIK_DEFINE_ERROR

}  // namespace subeik
