#pragma once

// Umbrella header for the solver library and the benchmark layer.

#include "swell/core.hpp"
#include "swell/riemann1d.hpp"
#include "swell/scheme_fo.hpp"
#include "swell/reconstruction.hpp"
#include "swell/scheme_ho.hpp"
#include "swell/ssprk.hpp"
#include "swell/wb_correction.hpp"
#include "swell/mood.hpp"
#include "swell/solver.hpp"
#include "swell/bench/config.hpp"
#include "swell/bench/cases.hpp"
#include "swell/bench/features.hpp"
#include "swell/bench/snapshot.hpp"
#include "swell/bench/run.hpp"
