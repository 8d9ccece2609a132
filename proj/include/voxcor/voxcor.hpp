#ifndef VOXCOR_VOXCOR_HPP
#define VOXCOR_VOXCOR_HPP

// Umbrella header.

#include "voxcor/assumptions.hpp"
#include "voxcor/engine.hpp"
#include "voxcor/gsn.hpp"
#include "voxcor/nifti.hpp"
#include "voxcor/oracle.hpp"
#include "voxcor/report.hpp"
#include "voxcor/stats.hpp"
#include "voxcor/timeseries.hpp"
#include "voxcor/types.hpp"

#endif
