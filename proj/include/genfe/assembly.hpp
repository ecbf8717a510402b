#pragma once

#include "genfe/assembly/assembler.hpp"
#include "genfe/assembly/context.hpp"
#include "genfe/assembly/dirichlet.hpp"
#include "genfe/assembly/dof_map.hpp"
#include "genfe/assembly/gather_scatter.hpp"
#include "genfe/assembly/linear_algebra.hpp"
