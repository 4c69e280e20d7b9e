#pragma once

#include "cvqboost/balancing.hpp"
#include "cvqboost/bench.hpp"
#include "cvqboost/common.hpp"
#include "cvqboost/dataset.hpp"
#include "cvqboost/hamiltonian.hpp"
#include "cvqboost/metrics.hpp"
#include "cvqboost/model.hpp"
#include "cvqboost/solver.hpp"
#include "cvqboost/weak.hpp"
