#pragma once

#include "clash/flash.hpp"
#include "clash/scheme_common.hpp"
#include "clash/clash_cache.hpp"
#include "clash/page_map_ftl.hpp"
#include "clash/dftl.hpp"
#include "clash/fast_ftl.hpp"
#include "clash/workload.hpp"
#include "clash/engine.hpp"
#include "clash/report.hpp"
#include "clash/config.hpp"
#include "clash/cli.hpp"
