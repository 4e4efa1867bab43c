#pragma once

#include <stdexcept>
#include <string>

namespace hfft {

// Invalid user-facing configuration (transform size, mode, parallelism, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File or stream problems while loading/storing samples and reports.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A broken internal invariant: bank access conflict, non-finite sample,
// or a plan that fails its own validation.
struct InternalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hfft
