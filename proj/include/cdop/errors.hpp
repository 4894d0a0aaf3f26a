#ifndef CDOP_ERRORS_HPP
#define CDOP_ERRORS_HPP

#include <map>
#include <stdexcept>
#include <string>

namespace cdop {

/// Broad failure classes. The CLI maps `precondition` to exit status 2 and
/// `numerical` to exit status 3.
enum class ErrorClass { precondition, numerical };

/// Base of every exception thrown by the library.
///
/// `witness()` carries the numbers needed to reproduce a numerical failure
/// standalone (a circle angle, a torus point, a time sample, ...).
class Error : public std::runtime_error {
 public:
  using Witness = std::map<std::string, double>;

  Error(ErrorClass cls, std::string kind, const std::string& what, Witness witness = {})
      : std::runtime_error(what), cls_(cls), kind_(std::move(kind)), witness_(std::move(witness)) {}

  ErrorClass error_class() const noexcept { return cls_; }
  const std::string& kind() const noexcept { return kind_; }
  const Witness& witness() const noexcept { return witness_; }

 private:
  ErrorClass cls_;
  std::string kind_;
  Witness witness_;
};

#define CDOP_DEFINE_ERROR(Name, cls, tag)                                        \
  class Name : public Error {                                                    \
   public:                                                                       \
    explicit Name(const std::string& what, Witness witness = {})                 \
        : Error(ErrorClass::cls, tag, what, std::move(witness)) {}               \
  };

CDOP_DEFINE_ERROR(DimensionError, precondition, "dimension")
CDOP_DEFINE_ERROR(DomainError, precondition, "domain")
CDOP_DEFINE_ERROR(PreconditionError, precondition, "precondition")
CDOP_DEFINE_ERROR(AlignmentError, precondition, "alignment")
CDOP_DEFINE_ERROR(ParseError, precondition, "parse")
CDOP_DEFINE_ERROR(SingularError, numerical, "singular")
CDOP_DEFINE_ERROR(NotInvertibleError, numerical, "not-invertible")
CDOP_DEFINE_ERROR(DivergenceError, numerical, "divergence")
CDOP_DEFINE_ERROR(ResourceError, numerical, "resource")
CDOP_DEFINE_ERROR(IllConditionedError, numerical, "ill-conditioned")
CDOP_DEFINE_ERROR(InconclusiveError, numerical, "inconclusive")
CDOP_DEFINE_ERROR(NumericalError, numerical, "numerical")

#undef CDOP_DEFINE_ERROR

}  // namespace cdop

#endif  // CDOP_ERRORS_HPP
