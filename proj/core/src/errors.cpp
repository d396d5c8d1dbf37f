#include "ptl/errors.hpp"

namespace ptl {

void require(bool condition, const std::string& message) {
  if (!condition) throw RejectedInput(message);
}

}  // namespace ptl
