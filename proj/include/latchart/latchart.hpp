#pragma once

// Umbrella header: lattice chart parsing with combined acoustic, bigram,
// prosody and grammar scores; decoder-coupled incremental control loop;
// parallel unification workers; parse-based evaluation.

#include "latchart/agenda.hpp"
#include "latchart/chart.hpp"
#include "latchart/core.hpp"
#include "latchart/engine.hpp"
#include "latchart/eval.hpp"
#include "latchart/feature.hpp"
#include "latchart/grammar.hpp"
#include "latchart/lattice.hpp"
#include "latchart/models.hpp"
#include "latchart/parallel.hpp"
#include "latchart/report.hpp"
