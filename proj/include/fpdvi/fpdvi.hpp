// Convenience umbrella: the whole toolkit in one include.

#pragma once

#include "fpdvi/errors.hpp"
#include "fpdvi/special.hpp"
#include "fpdvi/mittag_leffler.hpp"
#include "fpdvi/grid.hpp"
#include "fpdvi/random.hpp"
#include "fpdvi/convex.hpp"
#include "fpdvi/prox.hpp"
#include "fpdvi/monotone.hpp"
#include "fpdvi/vi.hpp"
#include "fpdvi/problem.hpp"
#include "fpdvi/fracops.hpp"
#include "fpdvi/parallel.hpp"
#include "fpdvi/evolution.hpp"
#include "fpdvi/hypotheses.hpp"
#include "fpdvi/expr.hpp"
#include "fpdvi/problem_io.hpp"
