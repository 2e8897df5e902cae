#pragma once

#include "qhalo/cat.hpp"
#include "qhalo/gaussian.hpp"
#include "qhalo/grid.hpp"
#include "qhalo/io.hpp"
#include "qhalo/kernel.hpp"
#include "qhalo/medium.hpp"
#include "qhalo/nelder_mead.hpp"
#include "qhalo/oracle.hpp"
#include "qhalo/oracle_matrix.hpp"
#include "qhalo/parallel.hpp"
#include "qhalo/params.hpp"
#include "qhalo/propagator.hpp"
#include "qhalo/sieve.hpp"
