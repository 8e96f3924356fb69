#pragma once

#include <stdexcept>
#include <string>

namespace flagmf {

/// Invalid mathematical input: composite modulus, inverse of zero, excluded character.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two operands live over different Z_N.
class ModulusMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The flag algorithm could not locate a line or a peak.
class DetectionError : public std::runtime_error {
 public:
  enum class Kind { kNoLine, kNoPeak, kSparsityExceeded };

  DetectionError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace flagmf
