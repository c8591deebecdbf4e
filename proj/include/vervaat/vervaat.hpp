#ifndef VERVAAT_VERVAAT_HPP_
#define VERVAAT_VERVAAT_HPP_

#include "vervaat/closed_forms.hpp"
#include "vervaat/convex_minorant.hpp"
#include "vervaat/experiments.hpp"
#include "vervaat/lattice.hpp"
#include "vervaat/parallel.hpp"
#include "vervaat/path.hpp"
#include "vervaat/path_io.hpp"
#include "vervaat/quadrature.hpp"
#include "vervaat/rng.hpp"
#include "vervaat/samplers.hpp"
#include "vervaat/stats.hpp"
#include "vervaat/thresholds.hpp"

#endif  // VERVAAT_VERVAAT_HPP_
