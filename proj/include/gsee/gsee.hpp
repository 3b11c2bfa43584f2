#pragma once

#include "gsee/bounds_lab.hpp"
#include "gsee/error.hpp"
#include "gsee/gaussian_core.hpp"
#include "gsee/gsee_algorithms.hpp"
#include "gsee/io.hpp"
#include "gsee/numeric.hpp"
#include "gsee/parallel.hpp"
#include "gsee/planner.hpp"
#include "gsee/rng.hpp"
#include "gsee/spectrum_sim.hpp"
