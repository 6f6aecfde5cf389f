#pragma once

// Umbrella header for the whole toolkit.

#include "finlstm/errors.hpp"

#include "finlstm/nn/adam.hpp"
#include "finlstm/nn/checkpoint.hpp"
#include "finlstm/nn/gradcheck.hpp"
#include "finlstm/nn/hyper.hpp"
#include "finlstm/nn/init.hpp"
#include "finlstm/nn/lstm.hpp"
#include "finlstm/nn/matrix.hpp"

#include "finlstm/data/csv.hpp"
#include "finlstm/data/date.hpp"
#include "finlstm/data/sequences.hpp"
#include "finlstm/data/synth.hpp"
#include "finlstm/data/tables.hpp"

#include "finlstm/ensemble/ensemble.hpp"
#include "finlstm/ensemble/train.hpp"

#include "finlstm/backtest/ledger.hpp"
#include "finlstm/backtest/stats.hpp"
#include "finlstm/backtest/sweep.hpp"

#include "finlstm/cli/config.hpp"
#include "finlstm/cli/pipeline.hpp"
#include "finlstm/cli/reports.hpp"
