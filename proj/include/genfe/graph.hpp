#pragma once

#include "genfe/graph/evaluation_types.hpp"
#include "genfe/graph/evaluator.hpp"
#include "genfe/graph/graph.hpp"
#include "genfe/graph/registry.hpp"
#include "genfe/graph/workset.hpp"
