#pragma once

// Umbrella header for the numerical core.

#include "elastic/curve.hpp"
#include "elastic/energy.hpp"
#include "elastic/error.hpp"
#include "elastic/evolve.hpp"
#include "elastic/field.hpp"
#include "elastic/metrics.hpp"
#include "elastic/spectral.hpp"
#include "elastic/synth.hpp"
