#pragma once

#include "genfe/analysis/continuation.hpp"
#include "genfe/analysis/linear_solvers.hpp"
#include "genfe/analysis/newton.hpp"
#include "genfe/analysis/optimizer.hpp"
#include "genfe/analysis/sensitivity.hpp"
#include "genfe/analysis/stochastic.hpp"
#include "genfe/analysis/verification.hpp"
