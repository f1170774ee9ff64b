#pragma once

// Umbrella header for the generalized Hardy operator toolkit.

#include "hardy/error.hpp"
#include "hardy/hankel.hpp"
#include "hardy/heat_kernels.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/radial.hpp"
#include "hardy/special_functions.hpp"
#include "hardy/spectral.hpp"
#include "hardy/verifier.hpp"
