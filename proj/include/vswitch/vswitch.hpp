#pragma once

#include "vswitch/core.hpp"
#include "vswitch/dispersion.hpp"
#include "vswitch/kernels.hpp"
#include "vswitch/oracle.hpp"
#include "vswitch/quadrature.hpp"
#include "vswitch/regions.hpp"
#include "vswitch/singular.hpp"
#include "vswitch/switching.hpp"
