#pragma once

#include "benchmarks.hpp"
#include "core.hpp"
#include "dominance.hpp"
#include "framework.hpp"
#include "harness.hpp"
#include "metrics.hpp"
#include "nsga3.hpp"
#include "stats.hpp"
#include "variation.hpp"
