#pragma once

// Umbrella header for the single-view axially-symmetric reconstruction
// library.

#include "abl/abelop.hpp"
#include "abl/core.hpp"
#include "abl/diffops.hpp"
#include "abl/grid.hpp"
#include "abl/io.hpp"
#include "abl/krylov.hpp"
#include "abl/metrics.hpp"
#include "abl/phantom.hpp"
#include "abl/prox.hpp"
#include "abl/solvers.hpp"
