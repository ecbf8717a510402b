#pragma once

#include "genfe/physics/evaluators.hpp"
#include "genfe/physics/materials.hpp"
#include "genfe/physics/objective.hpp"
#include "genfe/physics/parameters.hpp"
#include "genfe/physics/problem.hpp"
