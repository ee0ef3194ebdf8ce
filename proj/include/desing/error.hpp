#pragma once

#include <stdexcept>
#include <string>

namespace desing {

enum class Errc {
  invalid_argument,
  singular_parameter,
  newton_divergence,
  insufficient_samples,
  m_too_small,
  seam_mismatch,
  non_watertight,
  closure_overflow,
  degenerate_parametrization,
  near_singular_odd_subspace,
  graph_overlap,
  no_root,
  shooting_failure,
  equivariance_violation,
  invariant_undefined,
  insufficient_m_range,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// True for errors caused by bad user input rather than numerics.
bool is_input_error(Errc c);

}  // namespace desing
