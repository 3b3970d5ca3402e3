#pragma once

#include "qcurrents/types.hpp"
#include "qcurrents/linalg.hpp"
#include "qcurrents/lindblad.hpp"
#include "qcurrents/currents.hpp"
#include "qcurrents/fcs.hpp"
#include "qcurrents/trajectories.hpp"
#include "qcurrents/wtd.hpp"
#include "qcurrents/gaussian.hpp"
#include "qcurrents/analysis.hpp"
#include "qcurrents/models.hpp"
#include "qcurrents/model_io.hpp"
