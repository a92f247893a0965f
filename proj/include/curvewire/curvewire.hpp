#pragma once

#include "curvewire/chain.hpp"
#include "curvewire/geometry.hpp"
#include "curvewire/io.hpp"
#include "curvewire/numeric.hpp"
#include "curvewire/observables.hpp"
#include "curvewire/oracle.hpp"
#include "curvewire/profile.hpp"
#include "curvewire/scattering.hpp"
#include "curvewire/sweep.hpp"
#include "curvewire/units.hpp"
