#pragma once

// Umbrella header for the koop numerical laboratory.

#include "koop/attractor.hpp"
#include "koop/characterize.hpp"
#include "koop/errors.hpp"
#include "koop/geometry.hpp"
#include "koop/koopman.hpp"
#include "koop/observable.hpp"
#include "koop/report.hpp"
#include "koop/scenario.hpp"
#include "koop/semiflow.hpp"
#include "koop/serialize.hpp"
