#pragma once

#include "pendctl/errors.hpp"
#include "pendctl/matrix.hpp"
#include "pendctl/pendulum.hpp"
#include "pendctl/properties.hpp"
#include "pendctl/placement.hpp"
#include "pendctl/discretization.hpp"
#include "pendctl/simulation.hpp"
#include "pendctl/io.hpp"
#include "pendctl/commands.hpp"
