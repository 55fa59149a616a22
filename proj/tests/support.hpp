#pragma once

#include "sandpile/verify.hpp"

namespace sandpile::testing {

using sandpile::accounting_holds;
using sandpile::random_config;
using sandpile::random_multigraph;
using sandpile::random_sinks;

}  // namespace sandpile::testing
