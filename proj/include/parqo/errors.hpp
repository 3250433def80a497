#pragma once

#include <stdexcept>

namespace parqo {

/// Thrown when a Gram matrix A·Aᴴ is numerically singular or too
/// ill-conditioned to factorize reliably.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parqo
