#pragma once

// Umbrella header.

#include "fairbench/common.hpp"
#include "fairbench/dataset.hpp"
#include "fairbench/harness.hpp"
#include "fairbench/inprocess.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/model.hpp"
#include "fairbench/postprocess.hpp"
#include "fairbench/preprocess.hpp"
#include "fairbench/rng.hpp"
#include "fairbench/synthetic.hpp"
