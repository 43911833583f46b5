#pragma once

#include <stdexcept>

namespace chaosimg {

/// Contract violation raised by any stage of the pipeline. The message is the
/// diagnostic printed by the CLI.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chaosimg
