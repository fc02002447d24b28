#pragma once

#include "stlc/control_signal.hpp"
#include "stlc/control_synthesis.hpp"
#include "stlc/errors.hpp"
#include "stlc/moment_solver.hpp"
#include "stlc/quadrature.hpp"
#include "stlc/schrodinger_sim.hpp"
#include "stlc/settings.hpp"
#include "stlc/spectral_core.hpp"
