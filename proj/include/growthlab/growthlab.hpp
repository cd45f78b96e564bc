#pragma once

#include <growthlab/convex.hpp>
#include <growthlab/env.hpp>
#include <growthlab/errors.hpp>
#include <growthlab/hydro.hpp>
#include <growthlab/lattice.hpp>
#include <growthlab/loggamma.hpp>
#include <growthlab/mc.hpp>
#include <growthlab/specfun.hpp>
#include <growthlab/tasep.hpp>
