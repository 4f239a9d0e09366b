#ifndef FRACVISC_ERRORS_HPP
#define FRACVISC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fracvisc {

/// Argument outside the contract of an operation (wrong sign, out of range,
/// non-finite input, invalid configuration).
class domain_error : public std::domain_error {
  public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Evaluation requested exactly at a point where the quantity diverges
/// (e.g. the derivative of the relaxation kernel at x = 0 for alpha < 1).
class singularity_error : public domain_error {
  public:
    explicit singularity_error(const std::string& what) : domain_error(what) {}
};

/// The requested integral does not exist: the squared relaxation kernel
/// decays like s^(-2*alpha), which is integrable only for alpha > 1/2.
class non_integrable_error : public domain_error {
  public:
    explicit non_integrable_error(const std::string& what) : domain_error(what) {}
};

/// An iterative scheme (series, quadrature, root bracket, ODE stepper)
/// failed to reach its tolerance within the configured budget.
class convergence_error : public std::runtime_error {
  public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fracvisc

#endif
