#pragma once
// Umbrella header.

#include "divnewton/derivatives.hpp"
#include "divnewton/config.hpp"
#include "divnewton/driver.hpp"
#include "divnewton/experiment.hpp"
#include "divnewton/field_scanner.hpp"
#include "divnewton/fixtures.hpp"
#include "divnewton/jet.hpp"
#include "divnewton/lagrange.hpp"
#include "divnewton/line_search.hpp"
#include "divnewton/newton.hpp"
#include "divnewton/records.hpp"
#include "divnewton/rng.hpp"
#include "divnewton/test_functions.hpp"
