#pragma once

#include <stdexcept>
#include <string>

namespace abc {

// Mathematical domain violation (gamma pole, |x| >= 1 for Ferrers, ...).
class domain_error : public std::domain_error {
  public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// A documented operation precondition does not hold (repulsive coupling for
// spectrum calls, endpoint on the flux axis, energy inside the pole guard
// band, divergent integral representation, ...).
class precondition_error : public std::invalid_argument {
  public:
    explicit precondition_error(const std::string& what)
        : std::invalid_argument(what) {}
};

// A requested accuracy could not be certified (series cap hit, quadrature
// non-convergence, eigenfunction tail clipped by the grid).
class accuracy_error : public std::runtime_error {
  public:
    accuracy_error(const std::string& what, double best_estimate = 0.0)
        : std::runtime_error(what), best_estimate_(best_estimate) {}
    double best_estimate() const { return best_estimate_; }

  private:
    double best_estimate_;
};

}  // namespace abc
