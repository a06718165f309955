#pragma once

#include "d2d/units.hpp"
#include "d2d/random.hpp"
#include "d2d/scenario.hpp"
#include "d2d/geometry.hpp"
#include "d2d/channel.hpp"
#include "d2d/statmodel.hpp"
#include "d2d/outcome.hpp"
#include "d2d/cellular.hpp"
#include "d2d/bac.hpp"
#include "d2d/dac.hpp"
#include "d2d/oac.hpp"
#include "d2d/metrics.hpp"
#include "d2d/harness.hpp"
#include "d2d/report_io.hpp"
