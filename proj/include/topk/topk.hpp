#pragma once

#include "topk/arith.hpp"
#include "topk/coo.hpp"
#include "topk/fixed_point.hpp"
#include "topk/jacobi.hpp"
#include "topk/lanczos.hpp"
#include "topk/matrix_market.hpp"
#include "topk/solver.hpp"
#include "topk/spmv.hpp"
