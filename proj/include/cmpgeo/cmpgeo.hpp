#pragma once

#include "cmpgeo/applications.hpp"
#include "cmpgeo/comparison.hpp"
#include "cmpgeo/curvature.hpp"
#include "cmpgeo/index_form.hpp"
#include "cmpgeo/initial_operator.hpp"
#include "cmpgeo/jacobi.hpp"
#include "cmpgeo/random.hpp"
#include "cmpgeo/space_form.hpp"
#include "cmpgeo/types.hpp"
