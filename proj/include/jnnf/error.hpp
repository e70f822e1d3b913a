#pragma once

#include <stdexcept>
#include <string>

namespace jnnf {

// Precondition violations and resource-bound overruns surface as jnnf::error.
// Callers that need to distinguish bounds from bad input can catch bound_error.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct bound_error : error {
  using error::error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw error(msg);
}

}
