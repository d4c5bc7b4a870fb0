#pragma once

// Umbrella header for the certified Newton solver.

#include "kantsolve/certify.hpp"
#include "kantsolve/errors.hpp"
#include "kantsolve/majorant.hpp"
#include "kantsolve/newton.hpp"
#include "kantsolve/precondition.hpp"
#include "kantsolve/problem.hpp"
#include "kantsolve/report_json.hpp"
#include "kantsolve/verify.hpp"
