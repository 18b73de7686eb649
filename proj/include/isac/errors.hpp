#pragma once

#include <stdexcept>
#include <string>

namespace isac {

// Error taxonomy used across the library. The CLI maps ConfigError /
// SchemaError to exit code 2 and InfeasibleError / physics failures to 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AllocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SceneError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace isac
