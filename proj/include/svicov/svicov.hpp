#pragma once

#include "geometry.hpp"
#include "hexgrid.hpp"
#include "point_grid.hpp"
#include "sightline.hpp"
#include "segmentation.hpp"
#include "stats.hpp"
#include "curves.hpp"
#include "indicators.hpp"
#include "pipeline.hpp"
#include "interval.hpp"
#include "synth.hpp"
#include "io.hpp"
#include "config.hpp"
#include "cli.hpp"
