#pragma once

#include "driftscan/conformance.hpp"
#include "driftscan/detector.hpp"
#include "driftscan/discovery.hpp"
#include "driftscan/evaluation.hpp"
#include "driftscan/event_log.hpp"
#include "driftscan/loggen.hpp"
#include "driftscan/petri_net.hpp"
#include "driftscan/process_tree.hpp"
#include "driftscan/stats.hpp"
