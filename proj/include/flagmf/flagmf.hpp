#pragma once

#define FLAGMF_VERSION "0.1.0"

#include "flagmf/core_math.hpp"
#include "flagmf/fft.hpp"
#include "flagmf/operators.hpp"
#include "flagmf/sequences.hpp"
#include "flagmf/matched_filter.hpp"
#include "flagmf/channel_params.hpp"
#include "flagmf/channel_sim.hpp"
#include "flagmf/estimator.hpp"
