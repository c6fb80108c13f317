#pragma once

#include "bam/analysis.hpp"
#include "bam/comb.hpp"
#include "bam/core.hpp"
#include "bam/error.hpp"
#include "bam/lattice.hpp"
#include "bam/parallel.hpp"
#include "bam/pmf.hpp"
#include "bam/rng.hpp"
#include "bam/run.hpp"
#include "bam/snapshot.hpp"
#include "bam/star.hpp"
#include "bam/tree.hpp"
