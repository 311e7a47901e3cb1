#pragma once

#include "strobo/algebra.hpp"
#include "strobo/errors.hpp"
#include "strobo/tpsa/series.hpp"
#include "strobo/tpsa/multilinear.hpp"
#include "strobo/sysdsl/expr.hpp"
#include "strobo/sysdsl/system.hpp"
#include "strobo/flow/rk4.hpp"
#include "strobo/flow/graded.hpp"
#include "strobo/flow/displacement.hpp"
#include "strobo/bell/partitions.hpp"
#include "strobo/bell/time_poly.hpp"
#include "strobo/bell/bell_apply.hpp"
#include "strobo/averaging/recursion.hpp"
#include "strobo/averaging/verify.hpp"
#include "strobo/averaging/orbit.hpp"
