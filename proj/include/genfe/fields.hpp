#pragma once

#include "genfe/fields/arena.hpp"
#include "genfe/fields/field.hpp"
#include "genfe/fields/layout.hpp"
