#pragma once

#include "homog3/core.hpp"
#include "homog3/expm2.hpp"
#include "homog3/group.hpp"
#include "homog3/frames.hpp"
#include "homog3/model.hpp"
#include "homog3/chart.hpp"
#include "homog3/subgroups.hpp"
#include "homog3/surface.hpp"
#include "homog3/spectrum.hpp"
#include "homog3/rotational.hpp"
#include "homog3/invariant.hpp"
#include "homog3/flux.hpp"
#include "homog3/io.hpp"
