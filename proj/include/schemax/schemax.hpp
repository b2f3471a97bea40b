#pragma once

#include "schemax/bitspace.hpp"
#include "schemax/crossover.hpp"
#include "schemax/engine.hpp"
#include "schemax/io.hpp"
#include "schemax/mutation.hpp"
#include "schemax/popmodel.hpp"
#include "schemax/reference.hpp"
#include "schemax/scalar.hpp"
#include "schemax/walsh.hpp"
