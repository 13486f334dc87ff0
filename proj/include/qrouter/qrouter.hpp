#pragma once

// Single-photon routing through a flux-tunable three-level emitter in a
// nanowaveguide: cascaded master-equation propagation, closed-form steady
// scattering, entanglement metrics, and heralded state transfer.

#include "qrouter/analytic.hpp"
#include "qrouter/errors.hpp"
#include "qrouter/herald.hpp"
#include "qrouter/integrate.hpp"
#include "qrouter/io.hpp"
#include "qrouter/linalg.hpp"
#include "qrouter/metrics.hpp"
#include "qrouter/model.hpp"
#include "qrouter/params.hpp"
#include "qrouter/propagate.hpp"
#include "qrouter/scenario.hpp"
