#pragma once

#include <stdexcept>
#include <string>

namespace hmk {

enum class ErrorCode {
  Usage,          // bad arguments or config
  Domain,         // precondition on inputs violated
  OnCone,         // pointwise request on a singular locus
  Infrared,       // state does not exist (massless d=2, zero-mode bound band)
  Degenerate,     // boundary-on-cone point
  Unsupported,    // dimension/method combination not implemented
  NonConvergence  // quadrature or fit did not meet tolerance
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::Usage: return "USAGE";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::OnCone: return "ON_CONE";
    case ErrorCode::Infrared: return "INFRARED";
    case ErrorCode::Degenerate: return "DEGENERATE";
    case ErrorCode::Unsupported: return "UNSUPPORTED";
    case ErrorCode::NonConvergence: return "NON_CONVERGENCE";
  }
  return "UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

}  // namespace hmk
