#ifndef BEAMCOMB_BEAMCOMB_HPP
#define BEAMCOMB_BEAMCOMB_HPP

#include "beamcomb/core.hpp"
#include "beamcomb/rng.hpp"
#include "beamcomb/eig.hpp"
#include "beamcomb/secular.hpp"
#include "beamcomb/channel.hpp"
#include "beamcomb/beamspace.hpp"
#include "beamcomb/combiner.hpp"
#include "beamcomb/solvers.hpp"
#include "beamcomb/report.hpp"
#include "beamcomb/harness.hpp"

#endif
