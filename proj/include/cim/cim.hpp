#pragma once

#include "cim/bench.hpp"
#include "cim/circumcenter.hpp"
#include "cim/error.hpp"
#include "cim/linalg.hpp"
#include "cim/operators.hpp"
#include "cim/problem_io.hpp"
#include "cim/problems.hpp"
#include "cim/random.hpp"
#include "cim/solvers.hpp"
