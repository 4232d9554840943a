#pragma once

#include "slts/errors.hpp"
#include "slts/parallel.hpp"
#include "slts/core.hpp"
#include "slts/align.hpp"
#include "slts/sim.hpp"
#include "slts/metric_learning.hpp"
#include "slts/classifier.hpp"
#include "slts/ovr.hpp"
#include "slts/eval.hpp"
#include "slts/landmarks.hpp"
#include "slts/training.hpp"
#include "slts/synth.hpp"
#include "slts/io.hpp"
