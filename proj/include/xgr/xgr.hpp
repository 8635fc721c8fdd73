#pragma once

#include "xgr/error.hpp"
#include "xgr/strips.hpp"
#include "xgr/planner.hpp"
#include "xgr/domains.hpp"
#include "xgr/recognizer.hpp"
#include "xgr/explainer.hpp"
#include "xgr/scenario.hpp"
#include "xgr/metrics.hpp"
#include "xgr/bench.hpp"
#include "xgr/commands.hpp"
