#pragma once

#include <stdexcept>

namespace fraccd {

struct InvalidInterval final : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonIntegrableTail final : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SingularityTooStrong final : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError final : std::domain_error {
  using std::domain_error::domain_error;
};

struct SpecViolation final : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GrowthTooFast final : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NoViolationAtOrigin final : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fraccd
