#pragma once

// Core library. Input/output lives in io.hpp, which needs yaml-cpp.

#include "design.hpp"
#include "engine.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "limit.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "scalar.hpp"
#include "weights.hpp"
