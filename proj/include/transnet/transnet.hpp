#pragma once

// Umbrella header for the TransNet library: transfer learning of community
// structure from locally stored, randomized-response-perturbed source
// networks into a target network.

#include "transnet/dataio.hpp"
#include "transnet/experiments.hpp"
#include "transnet/federation.hpp"
#include "transnet/kmeans.hpp"
#include "transnet/metrics.hpp"
#include "transnet/netgen.hpp"
#include "transnet/network.hpp"
#include "transnet/pipeline.hpp"
#include "transnet/privacy.hpp"
#include "transnet/rng.hpp"
#include "transnet/spectral.hpp"
#include "transnet/svg.hpp"
#include "transnet/weighting.hpp"
