#pragma once

#include "frontier/core.hpp"
#include "frontier/csv.hpp"
#include "frontier/error.hpp"
#include "frontier/estimators.hpp"
#include "frontier/format.hpp"
#include "frontier/kn_select.hpp"
#include "frontier/mc_harness.hpp"
#include "frontier/normal.hpp"
#include "frontier/rng.hpp"
#include "frontier/simgen.hpp"
#include "frontier/tail_index.hpp"
