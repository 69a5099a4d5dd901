#pragma once

/** @file circbias.hpp
 *  @brief Umbrella header for the numerical library (everything except io.hpp).
 */

#include "circbias/circle.hpp"
#include "circbias/errors.hpp"
#include "circbias/newton.hpp"
#include "circbias/parallel.hpp"
#include "circbias/rational.hpp"
#include "circbias/realroots.hpp"
#include "circbias/rng.hpp"
#include "circbias/runners.hpp"
#include "circbias/shapiro.hpp"
#include "circbias/unipoly.hpp"
#include "circbias/version.hpp"
