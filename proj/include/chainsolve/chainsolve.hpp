#pragma once

#include "chainsolve/bench.hpp"
#include "chainsolve/bounds.hpp"
#include "chainsolve/error.hpp"
#include "chainsolve/model.hpp"
#include "chainsolve/network.hpp"
#include "chainsolve/operator.hpp"
#include "chainsolve/poisson.hpp"
#include "chainsolve/price_function.hpp"
#include "chainsolve/rng.hpp"
#include "chainsolve/solver.hpp"
