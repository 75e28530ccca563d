#pragma once

#include <stdexcept>
#include <string>

namespace wander {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WANDER_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

WANDER_DEFINE_ERROR(ParseError);
WANDER_DEFINE_ERROR(ValidationError);
WANDER_DEFINE_ERROR(IoError);
WANDER_DEFINE_ERROR(EmptyRegion);
WANDER_DEFINE_ERROR(NoCandidate);
WANDER_DEFINE_ERROR(NoPath);
WANDER_DEFINE_ERROR(StuckInGeometry);
WANDER_DEFINE_ERROR(NoViewpoint);
WANDER_DEFINE_ERROR(LengthMismatch);
WANDER_DEFINE_ERROR(DimensionMismatch);
WANDER_DEFINE_ERROR(EmptySet);
WANDER_DEFINE_ERROR(DegenerateInput);
WANDER_DEFINE_ERROR(SourceUnreachable);
WANDER_DEFINE_ERROR(AllRetriesFailed);
WANDER_DEFINE_ERROR(ConfigError);

#undef WANDER_DEFINE_ERROR

/// Aborting branch of fly-through generation.
class GenerationFailed : public Error {
 public:
  GenerationFailed(std::string stage, const std::string& detail)
      : Error("generation failed at " + stage + ": " + detail), stage_(std::move(stage)) {}

  /// One of no-start, no-path, cap-check, path-check, length-cap.
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class EpisodeFailed : public Error {
 public:
  EpisodeFailed(std::string reason, const std::string& detail)
      : Error("episode failed (" + reason + "): " + detail), reason_(std::move(reason)) {}

  const std::string& reason() const { return reason_; }

 private:
  std::string reason_;
};

}  // namespace wander
