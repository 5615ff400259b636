#pragma once

#include <stdexcept>
#include <string>

namespace planefield {

// Thrown when a series/quadrature cannot deliver the requested accuracy:
// non-convergence within the term budget, detected divergence, or refused
// results under the alternating-cancellation guard. The message names the
// failing operation.
class SeriesError : public std::runtime_error {
 public:
  explicit SeriesError(const std::string& op, const std::string& why)
      : std::runtime_error(op + ": " + why), op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

}  // namespace planefield
