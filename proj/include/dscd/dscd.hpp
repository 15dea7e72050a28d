#pragma once

#include "dscd/bilevel.hpp"
#include "dscd/global.hpp"
#include "dscd/harness.hpp"
#include "dscd/hybrid.hpp"
#include "dscd/local.hpp"
#include "dscd/objective.hpp"
#include "dscd/proposal.hpp"
#include "dscd/rng.hpp"
