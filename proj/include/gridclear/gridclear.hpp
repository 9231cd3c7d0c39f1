#pragma once

#include "gridclear/csv.hpp"
#include "gridclear/deterministic_kkt.hpp"
#include "gridclear/errors.hpp"
#include "gridclear/experiment.hpp"
#include "gridclear/fleet.hpp"
#include "gridclear/merit_order.hpp"
#include "gridclear/radial_dispatch.hpp"
#include "gridclear/risk.hpp"
#include "gridclear/scenario.hpp"
#include "gridclear/settlement.hpp"
