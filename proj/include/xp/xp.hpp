#pragma once

#include "xp/error.hpp"
#include "xp/rational.hpp"
#include "xp/indices.hpp"
#include "xp/taylor.hpp"
#include "xp/testfn.hpp"
#include "xp/grid.hpp"
#include "xp/quadrature.hpp"
#include "xp/norms.hpp"
#include "xp/interp.hpp"
#include "xp/derivation.hpp"
