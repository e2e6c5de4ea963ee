// cfgsimple.hpp - umbrella header.
#pragma once

#include "cfgsimple/degrees.hpp"
#include "cfgsimple/error.hpp"
#include "cfgsimple/exact.hpp"
#include "cfgsimple/experiments.hpp"
#include "cfgsimple/io.hpp"
#include "cfgsimple/report.hpp"
#include "cfgsimple/rng.hpp"
#include "cfgsimple/sampler.hpp"
#include "cfgsimple/surrogate.hpp"
