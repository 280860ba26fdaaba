#pragma once

// Convenience umbrella: the whole quantum-scissors toolkit in one include.

#include "qsd/analysis.hpp"
#include "qsd/detectors.hpp"
#include "qsd/errors.hpp"
#include "qsd/fock.hpp"
#include "qsd/numerics.hpp"
#include "qsd/optics.hpp"
#include "qsd/pipeline.hpp"
#include "qsd/presets.hpp"
#include "qsd/sweep.hpp"
#include "qsd/version.hpp"
