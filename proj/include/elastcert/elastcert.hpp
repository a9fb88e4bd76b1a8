#pragma once

#include "elastcert/errors.hpp"
#include "elastcert/tensor.hpp"
#include "elastcert/spectral.hpp"
#include "elastcert/sampling.hpp"
#include "elastcert/energy.hpp"
#include "elastcert/convexity.hpp"
#include "elastcert/fem.hpp"
#include "elastcert/solver.hpp"
#include "elastcert/certify.hpp"
#include "elastcert/hull.hpp"
#include "elastcert/json_io.hpp"
#include "elastcert/model_config.hpp"
