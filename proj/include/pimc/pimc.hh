/*
 * pimc.hh
 *
 * Umbrella header: PCTL model checking for discrete-time Markov
 * processes on finite and grid-abstracted continuous state spaces.
 */

#ifndef PIMC_PIMC_HH_
#define PIMC_PIMC_HH_

#include "pimc/absorbing.hh"
#include "pimc/checker.hh"
#include "pimc/decompose.hh"
#include "pimc/discretize.hh"
#include "pimc/engine.hh"
#include "pimc/formula.hh"
#include "pimc/horizon.hh"
#include "pimc/kernel.hh"
#include "pimc/mclinear.hh"
#include "pimc/model.hh"
#include "pimc/montecarlo.hh"
#include "pimc/report.hh"
#include "pimc/space.hh"

#endif  // PIMC_PIMC_HH_
