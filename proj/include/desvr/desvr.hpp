#ifndef DESVR_DESVR_HPP
#define DESVR_DESVR_HPP

#include "dataset.hpp"
#include "error.hpp"
#include "matrix.hpp"
#include "optim.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "svr.hpp"
#include "synthetic.hpp"
#include "text.hpp"
#include "tuning.hpp"

#endif
