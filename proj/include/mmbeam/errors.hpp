// SPDX-License-Identifier: Apache-2.0

#ifndef MMBEAM_ERRORS_HPP
#define MMBEAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mmbeam {

// Precondition or invariant violated by the caller.
class ContractViolation : public std::invalid_argument {
  public:
    explicit ContractViolation(const std::string &msg) : std::invalid_argument(msg) {}
};

// Iterative routine failed to converge.
class NumericalFailure : public std::runtime_error {
  public:
    NumericalFailure(const std::string &msg, int iterations)
        : std::runtime_error(msg + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}
    int iterations() const { return iterations_; }

  private:
    int iterations_;
};

// Requested a configuration the implementation does not support.
class UnsupportedConfiguration : public std::invalid_argument {
  public:
    explicit UnsupportedConfiguration(const std::string &msg) : std::invalid_argument(msg) {}
};

// Analog combiner produced a (near-)singular correlation matrix.
class DegenerateCombiner : public std::runtime_error {
  public:
    explicit DegenerateCombiner(const std::string &msg) : std::runtime_error(msg) {}
};

// CLI/experiment configuration failed validation; message lists all violations.
class ValidationError : public std::invalid_argument {
  public:
    explicit ValidationError(const std::string &msg) : std::invalid_argument(msg) {}
};

} // namespace mmbeam

#endif
