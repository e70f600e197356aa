#pragma once

#include "hylo/common.hpp"
#include "hylo/diagnostics.hpp"
#include "hylo/evolve.hpp"
#include "hylo/experiments.hpp"
#include "hylo/field.hpp"
#include "hylo/flow.hpp"
#include "hylo/functionals.hpp"
#include "hylo/grids.hpp"
#include "hylo/interp.hpp"
#include "hylo/io.hpp"
#include "hylo/norms.hpp"
#include "hylo/orbit.hpp"
#include "hylo/potential.hpp"
#include "hylo/radial.hpp"
#include "hylo/run.hpp"
