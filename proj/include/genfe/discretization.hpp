#pragma once

#include "genfe/discretization/basis.hpp"
#include "genfe/discretization/geometry.hpp"
#include "genfe/discretization/mesh.hpp"
#include "genfe/discretization/mesh_io.hpp"
#include "genfe/discretization/evaluators.hpp"
#include "genfe/discretization/layouts.hpp"
