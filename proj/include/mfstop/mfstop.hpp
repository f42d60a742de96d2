#pragma once

#include "mfstop/asymptotics.hpp"
#include "mfstop/config.hpp"
#include "mfstop/errors.hpp"
#include "mfstop/mean_field.hpp"
#include "mfstop/monte_carlo.hpp"
#include "mfstop/n_player.hpp"
#include "mfstop/parallel.hpp"
#include "mfstop/report.hpp"
#include "mfstop/reproduce.hpp"
#include "mfstop/rng.hpp"
#include "mfstop/signal_model.hpp"
