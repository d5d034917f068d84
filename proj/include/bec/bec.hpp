#pragma once

#include "bec/quadrature.hpp"
#include "bec/constants.hpp"
#include "bec/kernel.hpp"
#include "bec/cf_bounds.hpp"
#include "bec/parallel.hpp"
#include "bec/certifier.hpp"
#include "bec/empirical.hpp"
#include "bec/random_sums.hpp"
