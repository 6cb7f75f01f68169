#pragma once

#include "pdm/analytic.hpp"
#include "pdm/convergence.hpp"
#include "pdm/core.hpp"
#include "pdm/eigensolve.hpp"
#include "pdm/hamiltonian.hpp"
#include "pdm/theorems.hpp"
