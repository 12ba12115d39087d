#pragma once

/// Everything at once.

#include "errors.hpp"
#include "rng.hpp"
#include "parallel.hpp"
#include "boolcore.hpp"
#include "circuits.hpp"
#include "circuit_io.hpp"
#include "hardfn.hpp"
#include "designs.hpp"
#include "nwgen.hpp"
#include "restrictlab.hpp"
#include "nofproto.hpp"
#include "harness.hpp"
