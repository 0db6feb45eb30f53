#pragma once

#include "jetlab/gaussian_measures.hpp"
#include "jetlab/jet_layout.hpp"
#include "jetlab/jpd.hpp"
#include "jetlab/matrix_core.hpp"
#include "jetlab/model_ensembles.hpp"
#include "jetlab/quadrature.hpp"
#include "jetlab/random.hpp"
#include "jetlab/sphere_measures.hpp"
