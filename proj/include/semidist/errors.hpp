#pragma once

#include <stdexcept>
#include <string>

namespace semidist {

/// Parameter outside its documented domain (bad dof, level not in (0,1), ...).
class invalid_argument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the support of a density or the codomain of an estimator.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A quantile was requested so deep in a tail that the result is not representable.
class tail_underflow : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// Sample whose spread is zero where a later step divides by it or takes its log.
class degenerate_sample : public domain_error {
 public:
  using domain_error::domain_error;
};

/// Known nuisance parameter (sigma, sigma1, sigma2) required by the test but not supplied.
class missing_nuisance : public invalid_argument {
 public:
  using invalid_argument::invalid_argument;
};

/// Root-finding or calibration did not converge.
class calibration_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace semidist
