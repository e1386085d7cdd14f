#pragma once

#include "greenflow/bootstrap.hpp"
#include "greenflow/calibrate.hpp"
#include "greenflow/energy.hpp"
#include "greenflow/errors.hpp"
#include "greenflow/pipeline.hpp"
#include "greenflow/preprocess.hpp"
#include "greenflow/rng.hpp"
#include "greenflow/simulate.hpp"
#include "greenflow/sweep.hpp"
#include "greenflow/synth.hpp"
#include "greenflow/thermal.hpp"
#include "greenflow/trace.hpp"
#include "greenflow/vae.hpp"
