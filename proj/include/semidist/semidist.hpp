#pragma once

#include "semidist/distributions.hpp"
#include "semidist/errors.hpp"
#include "semidist/framework.hpp"
#include "semidist/generic_region.hpp"
#include "semidist/inference.hpp"
#include "semidist/interval_set.hpp"
#include "semidist/measurement.hpp"
#include "semidist/montecarlo.hpp"
#include "semidist/random.hpp"
#include "semidist/semidistance.hpp"
#include "semidist/special_functions.hpp"
