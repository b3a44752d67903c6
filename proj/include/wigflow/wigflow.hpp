/// @file wigflow.hpp
/// Umbrella header.
#pragma once

#include "wigflow/currents.hpp"
#include "wigflow/error.hpp"
#include "wigflow/export.hpp"
#include "wigflow/flux.hpp"
#include "wigflow/grid.hpp"
#include "wigflow/hamiltonian.hpp"
#include "wigflow/parallel.hpp"
#include "wigflow/quantifiers.hpp"
#include "wigflow/special.hpp"
#include "wigflow/stability.hpp"
#include "wigflow/wigner.hpp"
