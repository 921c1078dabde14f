#pragma once

#include "sls/blend.hpp"
#include "sls/cartpole.hpp"
#include "sls/causal_operator.hpp"
#include "sls/clm.hpp"
#include "sls/gain.hpp"
#include "sls/io.hpp"
#include "sls/kernel.hpp"
#include "sls/ltv_sls.hpp"
#include "sls/matrix_util.hpp"
#include "sls/plant.hpp"
#include "sls/random.hpp"
#include "sls/sequence.hpp"
#include "sls/simulate.hpp"
#include "sls/sl_controller.hpp"
