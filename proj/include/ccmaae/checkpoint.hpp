#pragma once

#include <optional>
#include <string>

#include "ccmaae/aae.hpp"

// Versioned JSON checkpoint container for a full model, optionally with the
// three Adam states. Doubles are serialised with shortest round-trip
// precision, so a reloaded model evaluates identically. The exact layout is
// documented in the README.

namespace ccmaae {

struct Checkpoint {
  CcmAae model;
  std::optional<AaeOptimizers> optimizers;
};

void save_checkpoint(const std::string& path, const CcmAae& model,
                     const AaeOptimizers* optimizers = nullptr);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace ccmaae
