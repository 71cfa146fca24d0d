#pragma once

// Umbrella header for the gapestim library (everything except the CLI).

#include "gapestim/chain.hpp"
#include "gapestim/chain_json.hpp"
#include "gapestim/doubling.hpp"
#include "gapestim/errors.hpp"
#include "gapestim/experiment.hpp"
#include "gapestim/hks.hpp"
#include "gapestim/linalg.hpp"
#include "gapestim/rng.hpp"
#include "gapestim/selfcheck.hpp"
#include "gapestim/trajectory.hpp"
