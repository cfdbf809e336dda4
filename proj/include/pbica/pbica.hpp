#pragma once

// Umbrella header: blind source separation via symmetric FastICA with either
// classical fixed nonlinearities or a score function learned from the data
// through projection-binned empirical characteristic functions.

#include "pbica/bench.hpp"
#include "pbica/ecf.hpp"
#include "pbica/errors.hpp"
#include "pbica/fastica.hpp"
#include "pbica/metrics.hpp"
#include "pbica/nonlinearity.hpp"
#include "pbica/preprocess.hpp"
#include "pbica/rng.hpp"
#include "pbica/score.hpp"
#include "pbica/synth.hpp"
