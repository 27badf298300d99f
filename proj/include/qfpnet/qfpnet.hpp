#ifndef QFPNET_QFPNET_HPP
#define QFPNET_QFPNET_HPP

#include "qfpnet/click_profile.hpp"
#include "qfpnet/complexity.hpp"
#include "qfpnet/core.hpp"
#include "qfpnet/decision.hpp"
#include "qfpnet/instances.hpp"
#include "qfpnet/io.hpp"
#include "qfpnet/montecarlo.hpp"
#include "qfpnet/optics.hpp"
#include "qfpnet/optimizer.hpp"
#include "qfpnet/probmodel.hpp"
#include "qfpnet/stats.hpp"

#endif
