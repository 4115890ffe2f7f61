#pragma once

#include "linar/agent.hpp"
#include "linar/baselines.hpp"
#include "linar/connectivity.hpp"
#include "linar/coverage.hpp"
#include "linar/geometry.hpp"
#include "linar/graph.hpp"
#include "linar/harness.hpp"
#include "linar/hungarian.hpp"
#include "linar/imaginary.hpp"
#include "linar/messages.hpp"
#include "linar/simulator.hpp"
#include "linar/topology.hpp"
#include "linar/validate.hpp"
