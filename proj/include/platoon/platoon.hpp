#pragma once

#include "platoon/analytic.hpp"
#include "platoon/errors.hpp"
#include "platoon/ffmatrix.hpp"
#include "platoon/gf2q.hpp"
#include "platoon/oracle.hpp"
#include "platoon/pmf.hpp"
#include "platoon/rng.hpp"
#include "platoon/sim.hpp"
#include "platoon/version.hpp"
