#include "wandrelay/run_log.hpp"

#include <fstream>
#include <sstream>

#include "wandrelay/error.hpp"

namespace wandrelay {

std::map<std::string, MessageState> RunLog::terminal_states() const {
    std::map<std::string, MessageState> out;
    for (const auto& f : frames) {
        if (f.frame.kind != FrameKind::FinalState) continue;
        const auto& p = f.frame.payload;
        auto state = message_state_from_string(p.value("state", std::string{}));
        if (!state) throw Error(Errc::ProtocolError, "FINAL_STATE with unknown state");
        out[p.value("message_id", std::string{})] = *state;
    }
    return out;
}

std::string RunLog::serialize() const {
    std::string out;
    for (const auto& f : frames) {
        out += encode_logged(f);
        out += '\n';
    }
    return out;
}

void RunLog::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << serialize();
    if (!out.flush()) throw Error(Errc::DataDirUnwritable, "cannot write " + path.string());
}

RunLog parse_run_log(std::string_view text) {
    RunLog log;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        ++line_no;
        pos = nl + 1;
        if (line.empty()) continue;
        try {
            log.frames.push_back(decode_logged(line));
        } catch (const Error& e) {
            throw Error(Errc::ProtocolError, "line " + std::to_string(line_no) + ": " + e.detail());
        }
    }
    return log;
}

RunLog read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, path.string() + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_log(buf.str());
}

}  // namespace wandrelay
