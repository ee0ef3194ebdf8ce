#pragma once

#include <string>
#include <vector>

#include "desing/io.hpp"

namespace desing {

struct ClaimInfo {
  int index = 0;
  std::string id;
  std::string anchor;
  bool gating = true;
};

// Every claim the acceptance suite checks, in report order.
const std::vector<ClaimInfo>& claim_registry();

struct AcceptanceOptions {
  unsigned seed = 20240517;
  int resolution = 32;       // assembly resolution for genus and symmetry meshes
  int tower_resolution = 128;
  int perturb_resolution = 16;
  int perturb_iters = 10;
  std::vector<int> scaling_ms = {4, 8, 16};
};

// Runs one criterion (1-based). Numerical errors are caught into a failing row.
VerificationReport run_criterion(int index, const AcceptanceOptions& opt = {});
std::vector<VerificationReport> run_acceptance(const AcceptanceOptions& opt = {});

// 0 when every gating row passes.
int acceptance_exit_code(const std::vector<VerificationReport>& rows);

}  // namespace desing
