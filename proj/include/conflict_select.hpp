#pragma once

#include "conflict_select/rational.hpp"
#include "conflict_select/errors.hpp"
#include "conflict_select/core.hpp"
#include "conflict_select/metrics.hpp"
#include "conflict_select/rules.hpp"
#include "conflict_select/generators.hpp"
#include "conflict_select/axioms.hpp"
#include "conflict_select/preflib.hpp"
#include "conflict_select/fixtures.hpp"
#include "conflict_select/experiment.hpp"
