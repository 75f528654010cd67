#ifndef TRAPFK_TRAPFK_HPP
#define TRAPFK_TRAPFK_HPP

#include "trapfk/errors.hpp"
#include "trapfk/rng.hpp"
#include "trapfk/lattice.hpp"
#include "trapfk/lattice_env.hpp"
#include "trapfk/stats_kit.hpp"
#include "trapfk/parallel.hpp"
#include "trapfk/srw_analytics.hpp"
#include "trapfk/fk_limit.hpp"
#include "trapfk/walk_sim.hpp"
#include "trapfk/coarse_grain.hpp"
#include "trapfk/plot.hpp"
#include "trapfk/report.hpp"
#include "trapfk/experiments.hpp"

#endif  // TRAPFK_TRAPFK_HPP
