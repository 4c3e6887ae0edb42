#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "wandrelay/run_log.hpp"
#include "wandrelay/scenario.hpp"
#include "wandrelay/service.hpp"

namespace wandrelay {

struct RunOptions {
    std::optional<std::uint64_t> seed_override;
    // Persist the in-process service here instead of keeping it in memory.
    std::optional<std::filesystem::path> data_dir;
};

// The service answered a simulated client with an ERROR frame.
class SimulationAborted : public std::runtime_error {
public:
    SimulationAborted(std::string code, const std::string& detail)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Boots an in-process service, plays the sender script and every recipient's
// sample stream in global time order, answers captures per the consent
// policy, and closes the run out at scenario end.
RunLog run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace wandrelay
