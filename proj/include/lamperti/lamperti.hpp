#pragma once

// Umbrella header: stationary processes, self-similar processes, and the
// Langevin-equation correspondence between them.

#include "lamperti/discrete.hpp"
#include "lamperti/generators.hpp"
#include "lamperti/integrate.hpp"
#include "lamperti/io.hpp"
#include "lamperti/langevin.hpp"
#include "lamperti/rng.hpp"
#include "lamperti/sample_path.hpp"
#include "lamperti/stats.hpp"
#include "lamperti/time_grid.hpp"
#include "lamperti/transform.hpp"
