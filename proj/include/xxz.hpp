#pragma once

#include "xxz/charges_boost.hpp"
#include "xxz/csv.hpp"
#include "xxz/dense.hpp"
#include "xxz/drude_bounds.hpp"
#include "xxz/ed/dynamics.hpp"
#include "xxz/ed/light_cone.hpp"
#include "xxz/ed/sectors.hpp"
#include "xxz/ed/spectral.hpp"
#include "xxz/errors.hpp"
#include "xxz/local_operator.hpp"
#include "xxz/numeric.hpp"
#include "xxz/operator_io.hpp"
#include "xxz/parallel.hpp"
#include "xxz/pauli_string.hpp"
#include "xxz/version.hpp"
#include "xxz/zcharge_mpo.hpp"
