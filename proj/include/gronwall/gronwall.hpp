#pragma once

#include "gronwall/core.hpp"
#include "gronwall/lattice.hpp"
#include "gronwall/spectral.hpp"
#include "gronwall/bound.hpp"
#include "gronwall/discrete.hpp"
#include "gronwall/volterra.hpp"
#include "gronwall/laplace1d.hpp"
#include "gronwall/semilinear.hpp"
#include "gronwall/random.hpp"
