#ifndef FRAMESCOPE_ERROR_HPP
#define FRAMESCOPE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace framescope {

enum class ErrorKind {
  DuplicateStage,
  UnknownStage,
  MissingExternal,
  DimensionMismatch,
  DegenerateWhite,
  DegenerateConfiguration,
  ConfigInvalid,
  ShapeMismatch,
  NonFiniteLoss,
  ZeroBaseline,
  EmptyEvaluation,
  EmptyStrategy,
  MissingBaseline,
  InsufficientOrderings,
  ParseError,
  UnknownCategory,
  MissingImageFile,
  DegeneratePolygon,
  InsufficientData,
  IoError,
};

/// Library-wide exception carrying a machine-readable kind plus a message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace framescope

#endif
