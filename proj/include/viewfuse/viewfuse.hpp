#pragma once

// Umbrella header: multi-view kNN fusion via per-user SVD rank aggregation,
// unified graph construction, consistency evaluation and synthetic data.

#include "viewfuse/aggregation.hpp"
#include "viewfuse/community.hpp"
#include "viewfuse/consistency.hpp"
#include "viewfuse/csv.hpp"
#include "viewfuse/errors.hpp"
#include "viewfuse/graph.hpp"
#include "viewfuse/manifest.hpp"
#include "viewfuse/parallel.hpp"
#include "viewfuse/profile.hpp"
#include "viewfuse/rng.hpp"
#include "viewfuse/synth.hpp"
#include "viewfuse/universe.hpp"
#include "viewfuse/view.hpp"
