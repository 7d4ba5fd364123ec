#pragma once

// Umbrella header for the numerical library (the CLI lives in protect/cli.hpp).

#include "protect/errors.hpp"
#include "protect/flow.hpp"
#include "protect/herglotz.hpp"
#include "protect/ldlt.hpp"
#include "protect/matrix.hpp"
#include "protect/protection.hpp"
#include "protect/realization.hpp"
#include "protect/spectral.hpp"
#include "protect/verify.hpp"
