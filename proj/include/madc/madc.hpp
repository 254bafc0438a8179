#pragma once

#include "madc/bits.hpp"
#include "madc/combinatorics.hpp"
#include "madc/constructions.hpp"
#include "madc/errors.hpp"
#include "madc/oracle.hpp"
#include "madc/pda.hpp"
#include "madc/privacy.hpp"
#include "madc/protocol.hpp"
#include "madc/rational.hpp"
#include "madc/rng.hpp"
