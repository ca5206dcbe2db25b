#pragma once

// Umbrella header.

#include "drsom/baselines.hpp"
#include "drsom/corrector.hpp"
#include "drsom/io.hpp"
#include "drsom/line_search.hpp"
#include "drsom/model.hpp"
#include "drsom/objective.hpp"
#include "drsom/problems.hpp"
#include "drsom/report.hpp"
#include "drsom/solver.hpp"
#include "drsom/trs.hpp"
#include "drsom/types.hpp"
