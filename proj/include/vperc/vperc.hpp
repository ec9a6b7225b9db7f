#pragma once

#include "vperc/estimators.hpp"
#include "vperc/explorer.hpp"
#include "vperc/geometry.hpp"
#include "vperc/harness.hpp"
#include "vperc/io.hpp"
#include "vperc/noise.hpp"
#include "vperc/parallel.hpp"
#include "vperc/percolation.hpp"
#include "vperc/rng.hpp"
#include "vperc/shapes.hpp"
#include "vperc/stats.hpp"
