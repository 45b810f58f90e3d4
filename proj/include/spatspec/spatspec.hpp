#pragma once

#include "spatspec/blockage.hpp"
#include "spatspec/config.hpp"
#include "spatspec/errors.hpp"
#include "spatspec/experiments.hpp"
#include "spatspec/geometry.hpp"
#include "spatspec/interference.hpp"
#include "spatspec/model.hpp"
#include "spatspec/montecarlo.hpp"
#include "spatspec/numerics.hpp"
#include "spatspec/performance.hpp"
#include "spatspec/spectral.hpp"
#include "spatspec/version.hpp"
