#pragma once

#include "config.hpp"
#include "correlation.hpp"
#include "density.hpp"
#include "disturbance.hpp"
#include "errors.hpp"
#include "format.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "optics.hpp"
#include "runner.hpp"
#include "seed.hpp"
