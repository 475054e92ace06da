#pragma once

#include "em.hpp"
#include "antennas.hpp"
#include "channel_gain.hpp"
#include "fading.hpp"
#include "link_metrics.hpp"
#include "relays.hpp"
#include "network.hpp"
#include "scenario.hpp"
#include "csv.hpp"
