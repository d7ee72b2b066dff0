#pragma once

#include "pegp/gp/factor.hpp"
#include "pegp/gp/kernel.hpp"
#include "pegp/gp/observation_log.hpp"
#include "pegp/gp/posterior.hpp"
#include "pegp/gp/posterior_bank.hpp"
#include "pegp/gp/types.hpp"
