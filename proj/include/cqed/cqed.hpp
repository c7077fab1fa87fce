// Umbrella header.

#pragma once

#include "cqed/analytic_1d.hpp"
#include "cqed/frustration.hpp"
#include "cqed/io/table.hpp"
#include "cqed/jc_ed.hpp"
#include "cqed/linalg/eigensolver.hpp"
#include "cqed/linalg/sparse_operator.hpp"
#include "cqed/meanfield.hpp"
#include "cqed/model.hpp"
#include "cqed/parallel.hpp"
#include "cqed/polya.hpp"
#include "cqed/sector_basis.hpp"
#include "cqed/spin_ed.hpp"
#include "cqed/version.hpp"
