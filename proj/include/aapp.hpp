#ifndef AAPP_HPP
#define AAPP_HPP

#include "aapp/aa.hpp"
#include "aapp/bench.hpp"
#include "aapp/dataio.hpp"
#include "aapp/error.hpp"
#include "aapp/init.hpp"
#include "aapp/matrix.hpp"
#include "aapp/nnls.hpp"
#include "aapp/rng.hpp"
#include "aapp/simplex.hpp"

#endif  // AAPP_HPP
