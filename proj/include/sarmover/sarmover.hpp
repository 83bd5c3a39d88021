#pragma once
/**
 * @file   sarmover.hpp
 * @brief  Umbrella header.
 */

#include <sarmover/types.hpp>
#include <sarmover/parallel.hpp>
#include <sarmover/geometry.hpp>
#include <sarmover/pattern.hpp>
#include <sarmover/image.hpp>
#include <sarmover/scene.hpp>
#include <sarmover/echo.hpp>
#include <sarmover/backproj.hpp>
#include <sarmover/mldd.hpp>
#include <sarmover/roaddet.hpp>
#include <sarmover/pipeline.hpp>
#include <sarmover/io.hpp>
#include <sarmover/bench.hpp>
