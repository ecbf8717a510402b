#pragma once

#include "genfe/morphing/morph.hpp"
