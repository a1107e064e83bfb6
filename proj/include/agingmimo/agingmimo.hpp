#pragma once

#include "agingmimo/bessel.hpp"
#include "agingmimo/channel.hpp"
#include "agingmimo/config.hpp"
#include "agingmimo/detequiv.hpp"
#include "agingmimo/errors.hpp"
#include "agingmimo/estimation.hpp"
#include "agingmimo/montecarlo.hpp"
#include "agingmimo/precoding.hpp"
#include "agingmimo/rates.hpp"
#include "agingmimo/rng.hpp"
#include "agingmimo/scenario.hpp"
#include "agingmimo/sweep.hpp"
#include "agingmimo/validation.hpp"
