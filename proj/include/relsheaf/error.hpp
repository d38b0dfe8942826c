#pragma once

#include <stdexcept>
#include <string>

namespace relsheaf {

// Failure kinds named after the contract they break. Verification routines
// throw these for violated preconditions; a falsified mathematical claim is
// reported through the Report types instead of thrown.
enum class errc {
  containment,
  not_exact,
  square,
  shape,
  bound,
  hypothesis_failed,
  not_flabby,
  no_full_set,
  not_covering,
  not_closed,
  not_containing,
  not_product_type,
  not_cocycle,
  not_coboundary,
  not_morphism,
  not_continuous,
  not_invertible,
  parse,
  validation,
};

inline const char* errc_name(errc k) {
  switch (k) {
    case errc::containment: return "ContainmentError";
    case errc::not_exact: return "NotExactError";
    case errc::square: return "SquareError";
    case errc::shape: return "ShapeError";
    case errc::bound: return "BoundError";
    case errc::hypothesis_failed: return "HypothesisFailed";
    case errc::not_flabby: return "NotFlabby";
    case errc::no_full_set: return "NoFullSet";
    case errc::not_covering: return "NotCovering";
    case errc::not_closed: return "NotClosed";
    case errc::not_containing: return "NotContaining";
    case errc::not_product_type: return "NotProductType";
    case errc::not_cocycle: return "NotCocycle";
    case errc::not_coboundary: return "NotCoboundary";
    case errc::not_morphism: return "NotMorphism";
    case errc::not_continuous: return "NotContinuous";
    case errc::not_invertible: return "NotInvertible";
    case errc::parse: return "ParseError";
    case errc::validation: return "ValidationError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(errc kind, const std::string& msg)
      : std::runtime_error(std::string(errc_name(kind)) + ": " + msg), kind_(kind) {}
  errc kind() const { return kind_; }

 private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw Error(kind, msg); }

inline void check(bool cond, errc kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

}  // namespace relsheaf
