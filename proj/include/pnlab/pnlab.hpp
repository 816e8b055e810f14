#pragma once

#include "pnlab/channel.hpp"
#include "pnlab/config.hpp"
#include "pnlab/equivalence.hpp"
#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/information.hpp"
#include "pnlab/lemma.hpp"
#include "pnlab/parallel.hpp"
#include "pnlab/psd.hpp"
#include "pnlab/random.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"
#include "pnlab/stochastics.hpp"
#include "pnlab/verify.hpp"
