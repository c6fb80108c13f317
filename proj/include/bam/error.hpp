#pragma once

#include <stdexcept>
#include <string>

namespace bam {

// Bad parameters: K < 2 for a star, N < 1, unknown family, ...
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation refused to start or was cut off because it would exceed a
// documented cap (state-space size, particle cap, rejection budget).
struct guard_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw config_error(what);
}

}  // namespace bam
