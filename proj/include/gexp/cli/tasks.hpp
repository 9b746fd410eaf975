#pragma once

#include "gexp/cli/config.hpp"
#include "gexp/cli/report.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace gexp::cli {

struct RunOptions {
    int jobs = 1;
    std::optional<std::uint64_t> seed;
};

/// Runs `task` on the configuration. Module precondition failures become
/// failed assertions; configuration problems throw ConfigError.
RunReport run(ScenarioConfig config, Task task, const RunOptions& options = {});

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Results must be
/// written by index so that the outcome does not depend on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace gexp::cli
