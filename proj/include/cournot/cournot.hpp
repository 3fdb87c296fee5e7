#pragma once

// Umbrella header: equilibrium computation for nonatomic games with
// separable costs via entropically regularized optimal transport.

#include "cournot/config.hpp"
#include "cournot/coupling.hpp"
#include "cournot/csv.hpp"
#include "cournot/diagnostics.hpp"
#include "cournot/dykstra.hpp"
#include "cournot/errors.hpp"
#include "cournot/matrix.hpp"
#include "cournot/model.hpp"
#include "cournot/multipop.hpp"
#include "cournot/prox.hpp"
#include "cournot/rootfind.hpp"
#include "cournot/runner.hpp"
#include "cournot/schemes.hpp"
#include "cournot/verify.hpp"
#include "cournot/version.hpp"
