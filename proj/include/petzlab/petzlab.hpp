#pragma once

#include "petzlab/bloch.hpp"
#include "petzlab/code.hpp"
#include "petzlab/codeopt.hpp"
#include "petzlab/experiments.hpp"
#include "petzlab/hardware.hpp"
#include "petzlab/lindblad.hpp"
#include "petzlab/operators.hpp"
#include "petzlab/optimize.hpp"
#include "petzlab/petz.hpp"
#include "petzlab/propagate.hpp"
#include "petzlab/rng.hpp"
#include "petzlab/schedule.hpp"
#include "petzlab/strobe.hpp"
#include "petzlab/superop.hpp"
#include "petzlab/version.hpp"
