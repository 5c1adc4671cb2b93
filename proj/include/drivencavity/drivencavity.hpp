#pragma once

// Umbrella header: one two-level atom in a driven, lossy cavity on
// resonance. Master-equation and quantum-trajectory evolution, closed-form
// post-emission branch states, entanglement measures, and the conditioned
// intensity-field correlation.

#include "branches.hpp"
#include "correlations.hpp"
#include "dynamics.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "hilbert.hpp"
#include "io.hpp"
#include "rng.hpp"
#include "trajectories.hpp"
#include "version.hpp"
