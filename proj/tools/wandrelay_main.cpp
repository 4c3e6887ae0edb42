#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "wandrelay/analytics.hpp"
#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"
#include "wandrelay/scenario.hpp"
#include "wandrelay/service.hpp"
#include "wandrelay/simulator.hpp"
#include "wandrelay/tcp_server.hpp"

namespace fs = std::filesystem;
using namespace wandrelay;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

// Every failure path ends in exactly one line like this on stderr.
int fail(std::string_view code, const std::string& detail, int exit_code) {
    std::cerr << "error[" << code << "] " << detail << '\n';
    return exit_code;
}

int fail(const Error& e, int exit_code) { return fail(errc_name(e.code()), e.detail(), exit_code); }

std::string resolve_data_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("WANDRELAY_DATA_DIR"); env && *env) return env;
    return "wandrelay-data";
}

struct ServeArgs {
    std::string listen = "127.0.0.1:7878";
    std::string data_dir;
    std::string scenario;
};

int cmd_serve(const ServeArgs& args, bool verbose) {
    try {
        ServiceOptions options;
        options.data_dir = resolve_data_dir(args.data_dir);
        std::optional<Scenario> scenario;
        if (!args.scenario.empty()) {
            scenario = load_scenario(args.scenario);
            options.declared_markers = scenario->marker_ids();
        }
        DeliveryService service(options);
        if (scenario) {
            for (const auto& r : scenario->recipients) service.register_principal(r.principal);
            for (const auto& s : scenario->senders()) service.register_principal(s);
        }
        TcpServer server(service, parse_listen_address(args.listen));

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "wandrelay: listening on port " << server.port() << ", data in " << *options.data_dir << '\n';
        if (verbose) {
            std::cerr << "wandrelay: " << service.messages().size() << " messages restored, "
                      << service.declared_markers().size() << " markers declared\n";
        }
        server.serve(g_stop);
        service.flush();
        std::cerr << "wandrelay: shut down, state flushed\n";
        return 0;
    } catch (const Error& e) {
        return fail(e, 1);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 2);
    }
}

struct SendArgs {
    std::string server = "127.0.0.1:7878";
    std::string sender;
    std::string recipient;
    std::string content;
    double scale = 1.0;
    double voice_duration = 3.0;
    std::string transcript;
    std::optional<double> lat, lon, radius;
    std::string window_start, window_end, marker;
    std::string specificity = "Specific";
    bool view = false;
};

int cmd_send(const SendArgs& args) {
    try {
        const auto address = parse_listen_address(args.server);
        WireClient client(address.host, address.port);
        client.send(Frame{FrameKind::Hello, {{"role", "sender"}, {"principal", args.sender}}});
        auto hello = client.receive();
        if (!hello || hello->kind != FrameKind::Ack) {
            return fail(hello ? hello->payload.value("code", "ProtocolError") : "ProtocolError",
                        hello ? hello->payload.value("detail", "") : "no reply to HELLO", 1);
        }

        if (args.view) {
            client.send(Frame{FrameKind::SenderViewReq, {{"sender_id", args.sender}}});
        } else {
            ComposeArgs compose_args{args.sender, args.recipient, args.content, args.scale,
                                     VoiceNote{args.voice_duration, args.transcript}, std::nullopt};
            TriggerSchedule schedule;
            if (args.lat || args.lon || args.radius) {
                if (!(args.lat && args.lon && args.radius)) {
                    return fail("ParseError", "--lat, --lon and --radius go together", 1);
                }
                schedule.geofence = Geofence{{*args.lat, *args.lon}, *args.radius};
            }
            if (!args.window_start.empty() || !args.window_end.empty()) {
                schedule.window = TimeWindow{parse_rfc3339(args.window_start), parse_rfc3339(args.window_end)};
            }
            MarkerSet markers;
            if (!args.marker.empty()) {
                schedule.marker = MarkerCondition{args.marker};
                markers.insert(args.marker);  // the server holds the authoritative marker set
            }
            auto spec = specificity_from_string(args.specificity);
            if (!spec) return fail("ParseError", "--specificity must be Specific or Flexible", 1);
            schedule.specificity = *spec;
            if (schedule.condition_count() > 0) compose_args.schedule = schedule;

            const auto now = std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
            MessageIdGenerator ids(std::random_device{}());
            const auto message = compose(compose_args, markers, ids, now);
            client.send(Frame{FrameKind::Submit, {{"message", codec::encode(message)}}});
        }

        auto reply = client.receive();
        if (!reply) return fail("ProtocolError", "no reply from server", 1);
        std::cout << encode_frame(*reply) << '\n';
        if (reply->kind == FrameKind::Error) {
            return fail(reply->payload.value("code", "ProtocolError"), reply->payload.value("detail", ""), 1);
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, 1);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 2);
    }
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed_override, bool verbose) {
    Scenario scenario;
    try {
        scenario = load_scenario(scenario_path);
    } catch (const Error& e) {
        return fail(e, 1);
    }
    try {
        RunOptions options;
        options.seed_override = seed_override;
        const auto log = run(scenario, options);
        if (out_path.empty() || out_path == "-") {
            std::cout << log.serialize();
        } else {
            log.write(out_path);
        }
        if (verbose) {
            std::cerr << "wandrelay: " << log.frames.size() << " frames, " << log.terminal_states().size()
                      << " messages\n";
        }
        return 0;
    } catch (const SimulationAborted& e) {
        return fail(e.code(), e.what(), 2);
    } catch (const Error& e) {
        return fail(e, 2);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 2);
    }
}

int cmd_report(const std::vector<std::string>& logs, const std::string& format, const std::string& out_path) {
    try {
        std::vector<RunLog> loaded;
        for (const auto& path : logs) {
            if (!fs::exists(path)) return fail("ParseError", path + ": no such file", 1);
            loaded.push_back(read_run_log(path));
        }
        const auto report = analytics::summarize(loaded);
        const auto text = format == "csv" ? analytics::render_csv(report) : analytics::render_text(report);
        if (out_path.empty() || out_path == "-") {
            std::cout << text;
        } else {
            std::ofstream out(out_path, std::ios::trunc);
            out << text;
            if (!out.flush()) return fail("DataDirUnwritable", "cannot write " + out_path, 1);
        }
        return 0;
    } catch (const Error& e) {
        return fail(e, 1);
    } catch (const std::exception& e) {
        return fail("InternalError", e.what(), 2);
    }
}

int cmd_validate(const std::string& scenario_path) {
    try {
        const auto sc = load_scenario(scenario_path);
        std::cout << "ok: " << (sc.name.empty() ? scenario_path : sc.name) << " (" << sc.recipients.size()
                  << " recipients, " << sc.sender_script.size() << " scripted messages, " << sc.markers.size()
                  << " markers)\n";
        return 0;
    } catch (const Error& e) {
        return fail(e, 1);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wandrelay: context-triggered AR message relay"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Extra diagnostics on stderr");

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "Run the delivery service");
    serve_cmd->add_option("--listen", serve.listen, "host:port to listen on")->capture_default_str();
    serve_cmd->add_option("--data-dir", serve.data_dir, "State directory (default $WANDRELAY_DATA_DIR)");
    serve_cmd->add_option("--scenario", serve.scenario, "Scenario whose markers and principals to preload");

    SendArgs send;
    auto* send_cmd = app.add_subcommand("send", "Submit one message to a running service");
    send_cmd->add_option("--listen", send.server, "Service address")->capture_default_str();
    send_cmd->add_option("--sender", send.sender)->required();
    send_cmd->add_option("--recipient", send.recipient);
    send_cmd->add_option("--content", send.content, "Catalog content id");
    send_cmd->add_option("--scale", send.scale)->capture_default_str();
    send_cmd->add_option("--voice-duration", send.voice_duration, "Voice note seconds")->capture_default_str();
    send_cmd->add_option("--transcript", send.transcript);
    send_cmd->add_option("--lat", send.lat);
    send_cmd->add_option("--lon", send.lon);
    send_cmd->add_option("--radius", send.radius, "Geofence radius, meters");
    send_cmd->add_option("--window-start", send.window_start, "RFC 3339");
    send_cmd->add_option("--window-end", send.window_end, "RFC 3339");
    send_cmd->add_option("--marker", send.marker);
    send_cmd->add_option("--specificity", send.specificity)->capture_default_str();
    send_cmd->add_flag("--view", send.view, "Print the sender view instead of submitting");

    std::string scenario_path, out_path;
    std::optional<std::uint64_t> seed_override;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and write its run log");
    sim_cmd->add_option("--scenario", scenario_path)->required();
    sim_cmd->add_option("--out", out_path, "Run log path (stdout if omitted)");
    sim_cmd->add_option("--seed-override", seed_override, "Replace the scenario seed");

    std::vector<std::string> logs;
    std::string format = "text";
    std::string report_out;
    auto* report_cmd = app.add_subcommand("report", "Summarize run logs");
    report_cmd->add_option("logs", logs, "Run log files")->required();
    report_cmd->add_option("--format", format)->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    report_cmd->add_option("--out", report_out, "Write the report here instead of stdout");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file");
    validate_cmd->add_option("--scenario", validate_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error[UsageError] " << e.what() << '\n';
        return 1;
    }

    if (*serve_cmd) return cmd_serve(serve, verbose);
    if (*send_cmd) return cmd_send(send);
    if (*sim_cmd) return cmd_simulate(scenario_path, out_path, seed_override, verbose);
    if (*report_cmd) return cmd_report(logs, format, report_out);
    if (*validate_cmd) return cmd_validate(validate_path);
    return 1;
}
