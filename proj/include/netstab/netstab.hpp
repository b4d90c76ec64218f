#pragma once

#include "netstab/version.hpp"
#include "netstab/linalg.hpp"
#include "netstab/pattern.hpp"
#include "netstab/graph.hpp"
#include "netstab/analyze.hpp"
#include "netstab/attack.hpp"
#include "netstab/recovery.hpp"
#include "netstab/oracle.hpp"
