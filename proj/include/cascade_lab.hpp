#pragma once

#include "cascade_lab/types.hpp"
#include "cascade_lab/topology.hpp"
#include "cascade_lab/strategy.hpp"
#include "cascade_lab/engine.hpp"
#include "cascade_lab/complete_opt.hpp"
#include "cascade_lab/exact_oracle.hpp"
#include "cascade_lab/rng.hpp"
#include "cascade_lab/parallel.hpp"
#include "cascade_lab/gnq.hpp"
#include "cascade_lab/layers.hpp"
#include "cascade_lab/simulator.hpp"
#include "cascade_lab/random_graph.hpp"
#include "cascade_lab/compare.hpp"
