#pragma once

#include "entsplit/discrimination.hpp"
#include "entsplit/errors.hpp"
#include "entsplit/measurement.hpp"
#include "entsplit/product_search.hpp"
#include "entsplit/splitting.hpp"
#include "entsplit/subspace.hpp"
#include "entsplit/tensor_core.hpp"
#include "entsplit/tolerances.hpp"
