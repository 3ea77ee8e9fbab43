#pragma once

#include "allocation.hpp"
#include "distribution.hpp"
#include "ext_real.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "market.hpp"
#include "numerics.hpp"
#include "payoff.hpp"
#include "simulation.hpp"
