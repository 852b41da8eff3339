#pragma once

// Umbrella header for the affine-velocity Lagrangian analysis library.

#include "avlag/analysis.hpp"
#include "avlag/calculus.hpp"
#include "avlag/canonical.hpp"
#include "avlag/error.hpp"
#include "avlag/expr.hpp"
#include "avlag/flow.hpp"
#include "avlag/geometry.hpp"
#include "avlag/linalg.hpp"
#include "avlag/numeric.hpp"
#include "avlag/parse.hpp"
#include "avlag/pipeline.hpp"
#include "avlag/problem.hpp"
#include "avlag/rational.hpp"
#include "avlag/report.hpp"
#include "avlag/symbol.hpp"
