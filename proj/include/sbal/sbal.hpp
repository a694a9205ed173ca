#pragma once

#include "sbal/balance.hpp"
#include "sbal/dynamics.hpp"
#include "sbal/errors.hpp"
#include "sbal/export.hpp"
#include "sbal/influence.hpp"
#include "sbal/matrix.hpp"
#include "sbal/matrix_io.hpp"
#include "sbal/pipeline.hpp"
#include "sbal/random.hpp"
#include "sbal/spectral.hpp"
#include "sbal/svg_plot.hpp"
