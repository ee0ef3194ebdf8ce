#include "desing/error.hpp"

namespace desing {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::singular_parameter: return "singular-parameter";
    case Errc::newton_divergence: return "newton-divergence";
    case Errc::insufficient_samples: return "insufficient-samples";
    case Errc::m_too_small: return "m-too-small";
    case Errc::seam_mismatch: return "seam-mismatch";
    case Errc::non_watertight: return "non-watertight";
    case Errc::closure_overflow: return "closure-overflow";
    case Errc::degenerate_parametrization: return "degenerate-parametrization";
    case Errc::near_singular_odd_subspace: return "near-singular-odd-subspace";
    case Errc::graph_overlap: return "graph-overlap";
    case Errc::no_root: return "no-root";
    case Errc::shooting_failure: return "shooting-failure";
    case Errc::equivariance_violation: return "equivariance-violation";
    case Errc::invariant_undefined: return "invariant-undefined";
    case Errc::insufficient_m_range: return "insufficient-m-range";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

bool is_input_error(Errc c) {
  return c == Errc::invalid_argument || c == Errc::m_too_small ||
         c == Errc::invariant_undefined || c == Errc::insufficient_m_range ||
         c == Errc::equivariance_violation || c == Errc::io_error;
}

}  // namespace desing
