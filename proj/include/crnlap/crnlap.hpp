#pragma once

#include "crnlap/error.hpp"
#include "crnlap/scalar.hpp"
#include "crnlap/linalg.hpp"
#include "crnlap/graph.hpp"
#include "crnlap/laplacian.hpp"
#include "crnlap/network.hpp"
#include "crnlap/equilibria.hpp"
#include "crnlap/geometry.hpp"
#include "crnlap/stability.hpp"
