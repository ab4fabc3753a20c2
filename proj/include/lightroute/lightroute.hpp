#pragma once

#include "lightroute/auxgraph.hpp"
#include "lightroute/cost.hpp"
#include "lightroute/errors.hpp"
#include "lightroute/experiment.hpp"
#include "lightroute/graph.hpp"
#include "lightroute/network_state.hpp"
#include "lightroute/rng.hpp"
#include "lightroute/routing.hpp"
#include "lightroute/simulator.hpp"
#include "lightroute/stats.hpp"
#include "lightroute/topology.hpp"
