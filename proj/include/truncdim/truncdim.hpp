#pragma once

// truncdim: truncation-error bounds and epsilon-truncation dimensions for
// linear problems on gamma-weighted anchored spaces, with the kernel norm
// constants of the concrete space families and anchored/unanchored
// embedding norms.

#include "truncdim/embeddings.hpp"
#include "truncdim/errors.hpp"
#include "truncdim/exponent.hpp"
#include "truncdim/kernels.hpp"
#include "truncdim/oracles.hpp"
#include "truncdim/quadrature.hpp"
#include "truncdim/reference_tables.hpp"
#include "truncdim/series.hpp"
#include "truncdim/special_functions.hpp"
#include "truncdim/truncation.hpp"
#include "truncdim/weights.hpp"

namespace truncdim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace truncdim
