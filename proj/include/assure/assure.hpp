#pragma once

// Umbrella header.

#include "assure/assurance.hpp"
#include "assure/betabinom.hpp"
#include "assure/conjugate_lm.hpp"
#include "assure/costeff.hpp"
#include "assure/errors.hpp"
#include "assure/linalg.hpp"
#include "assure/mc_engine.hpp"
#include "assure/precision.hpp"
#include "assure/scalar.hpp"
#include "assure/scenario.hpp"
#include "assure/sizing.hpp"
#include "assure/statkit.hpp"
