#pragma once

#include "candidate.hpp"
#include "dsl.hpp"
#include "errors.hpp"
#include "fixed_point.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "kkm.hpp"
#include "prefs.hpp"
#include "selfmap.hpp"
#include "setfamily.hpp"
#include "solver.hpp"
#include "universe.hpp"
