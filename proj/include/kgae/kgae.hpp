#pragma once

// Umbrella header: corpus embedding, knowledge-graph hierarchy, the
// belief-network autoencoder and the equilibrium test.

#include "kgae/cli.hpp"
#include "kgae/corpus.hpp"
#include "kgae/dbn.hpp"
#include "kgae/error.hpp"
#include "kgae/graph.hpp"
#include "kgae/hierarchy.hpp"
#include "kgae/io.hpp"
#include "kgae/matrix.hpp"
#include "kgae/rng.hpp"
#include "kgae/stats.hpp"
#include "kgae/svd.hpp"
