// Umbrella header: the full hourly line-energization and robust dispatch
// engine under quantified wildfire-ignition risk.

#pragma once

#include "embergrid/model.hpp"
#include "embergrid/case_io.hpp"
#include "embergrid/synth_scores.hpp"
#include "embergrid/lp.hpp"
#include "embergrid/lp_write.hpp"
#include "embergrid/simplex.hpp"
#include "embergrid/milp.hpp"
#include "embergrid/second_stage.hpp"
#include "embergrid/master.hpp"
#include "embergrid/subproblem.hpp"
#include "embergrid/ccg.hpp"
#include "embergrid/risk.hpp"
#include "embergrid/sweep.hpp"
#include "embergrid/artifacts.hpp"
