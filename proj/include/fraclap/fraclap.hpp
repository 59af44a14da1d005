#pragma once

#include "fraclap/errors.hpp"
#include "fraclap/grid_function.hpp"
#include "fraclap/lattice.hpp"
#include "fraclap/mesh.hpp"
#include "fraclap/operator.hpp"
#include "fraclap/reaction.hpp"
#include "fraclap/spectral.hpp"
#include "fraclap/string_method.hpp"
#include "fraclap/variational.hpp"
