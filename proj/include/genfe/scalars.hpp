#pragma once

#include "genfe/scalars/dual.hpp"
#include "genfe/scalars/pce.hpp"
#include "genfe/scalars/traits.hpp"
