#pragma once

// Umbrella header for the vouw pattern mining library.

#include "encoding.hpp"  // IWYU pragma: export
#include "eval.hpp"      // IWYU pragma: export
#include "grid.hpp"      // IWYU pragma: export
#include "io.hpp"        // IWYU pragma: export
#include "miner.hpp"     // IWYU pragma: export
#include "ril.hpp"       // IWYU pragma: export
