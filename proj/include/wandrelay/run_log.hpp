#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wandrelay/message.hpp"
#include "wandrelay/protocol.hpp"

namespace wandrelay {

// Every frame of a run in order, one JSON line each. Terminal message states
// are the trailing FINAL_STATE records.
struct RunLog {
    std::vector<LoggedFrame> frames;

    std::map<std::string, MessageState> terminal_states() const;
    std::string serialize() const;  // newline-terminated lines
    void write(const std::filesystem::path& path) const;
};

RunLog parse_run_log(std::string_view text);  // throws Error{ProtocolError}
RunLog read_run_log(const std::filesystem::path& path);

}  // namespace wandrelay
