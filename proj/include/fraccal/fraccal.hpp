// Umbrella header.
#ifndef FRACCAL_FRACCAL_HPP
#define FRACCAL_FRACCAL_HPP

#include "core.hpp"
#include "quadrature.hpp"
#include "spherical_harmonics.hpp"
#include "spectral_model.hpp"
#include "models.hpp"
#include "kernel_samples.hpp"
#include "operators.hpp"
#include "sources.hpp"
#include "identification.hpp"
#include "reduction.hpp"
#include "pairs.hpp"
#include "oracles.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "acceptance.hpp"

#endif
