#pragma once

// Umbrella header for the stablechaos library.

#include "stablechaos/stable_sampling.hpp"
#include "stablechaos/kernels.hpp"
#include "stablechaos/noise_field.hpp"
#include "stablechaos/chaos_expansion.hpp"
#include "stablechaos/diagnostics.hpp"
#include "stablechaos/run_config.hpp"
#include "stablechaos/field_runner.hpp"
#include "stablechaos/verify.hpp"
