#ifndef GOC_ERRORS_HPP_
#define GOC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace goc {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureNotConverged : public Error {
 public:
  using Error::Error;
};

//! G10(r0) vanishes, so no beta can make r0 an extremum.
class DegenerateG10 : public Error {
 public:
  using Error::Error;
};

//! The second-order coefficient came out with a non-negligible imaginary part.
class ComplexResidue : public Error {
 public:
  using Error::Error;
};

class NonPositiveRadius : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class DegenerateClass : public Error {
 public:
  using Error::Error;
};

class PlacementFailed : public Error {
 public:
  using Error::Error;
};

class ConstantImage : public Error {
 public:
  using Error::Error;
};

//! Malformed input file or configuration value.
class ParseError : public Error {
 public:
  using Error::Error;
};

//! Parameters that are well-formed but unusable (e.g. no stable minimum).
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace goc

#endif  // GOC_ERRORS_HPP_
