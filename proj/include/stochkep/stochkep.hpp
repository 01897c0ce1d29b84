#pragma once

// Umbrella header: the whole clearing engine.

#include "stochkep/branch_price.hpp"
#include "stochkep/cvar.hpp"
#include "stochkep/exchange_graph.hpp"
#include "stochkep/expected_value.hpp"
#include "stochkep/formulations.hpp"
#include "stochkep/highs_solver.hpp"
#include "stochkep/instance_gen.hpp"
#include "stochkep/io.hpp"
#include "stochkep/lp_format.hpp"
#include "stochkep/milp.hpp"
#include "stochkep/rng.hpp"
#include "stochkep/sim_eval.hpp"
