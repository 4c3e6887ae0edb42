#include "helpers.hpp"

#include "../oracles/oracles.hpp"
#include "wandrelay/run_log.hpp"
#include "wandrelay/scenario.hpp"
#include "wandrelay/simulator.hpp"

using namespace wandrelay;

namespace {
// Two waypoints 20 m apart, one direct message, glasses on throughout.
std::string minimal(std::string tweak = {}) {
    std::string s = R"({
  "schema": "wandrelay.scenario/1",
  "name": "minimal",
  "seed": 3,
  "tick": 1,
  "end": "2021-06-01T09:01:00Z",
  "markers": [{"marker_id": "poster_1", "position": {"lat": 47.6062, "lon": -122.3321}}],
  "recipients": [{
    "principal": "r1",
    "wear_sessions": [{"start": "2021-06-01T09:00:00Z", "end": "2021-06-01T09:01:00Z"}],
    "trajectory": [
      {"t": "2021-06-01T09:00:00Z", "lat": 47.6062, "lon": -122.3321},
      {"t": "2021-06-01T09:00:20Z", "lat": 47.60637986, "lon": -122.3321},
      {"t": "2021-06-01T09:01:00Z", "lat": 47.60637986, "lon": -122.3321}
    ]
  }],
  "sender_script": [{
    "at": "2021-06-01T09:00:00Z", "ref": "hi", "sender": "s1", "recipient": "r1",
    "content_id": "dog", "scale": 1.0, "voice_note": {"duration": 3, "transcript": "hello"}
    MARKER
  }],
  "consent_policy": {"default": "Yes", "default_utterances": [{"offset": 2, "transcript": "wow"}]}
})";
    auto pos = s.find("MARKER");
    s.replace(pos, 6, tweak);
    return s;
}
}  // namespace

TEST_CASE("minimal scenario parses") {
    auto sc = parse_scenario(minimal());
    CHECK(sc.name == "minimal");
    CHECK(sc.recipients.size() == 1);
    CHECK(sc.sender_script.size() == 1);
    CHECK(sc.senders() == std::vector<std::string>{"s1"});
}

TEST_CASE("scenario errors") {
    auto text = minimal();
    auto swapped = text;
    swapped.replace(swapped.find("09:00:20Z"), 9, "08:59:59Z");
    CHECK_ERRC(parse_scenario(swapped), Errc::ParseError);
    CHECK_ERRC(parse_scenario(minimal(R"(, "schedule": {"marker": {"marker_id": "poster_9"}})")), Errc::ParseError);
    CHECK_ERRC(parse_scenario("{ not json"), Errc::ParseError);
    CHECK_NOTHROW(parse_scenario(minimal(R"(, "schedule": {"marker": {"marker_id": "poster_1"}})")));
}

TEST_CASE("sample stream interpolation and wearing") {
    auto sc = parse_scenario(minimal());
    auto& plan = sc.recipients[0];
    auto w0 = plan.trajectory[0], w1 = plan.trajectory[1];
    CHECK(position_at(plan, w1.t) == w1.position);
    auto mid = position_at(plan, w0.t + (w1.t - w0.t) / 2);
    const double seg = oracle::distance_m(w0.position.lat, w0.position.lon, w1.position.lat, w1.position.lon);
    CHECK(seg == doctest::Approx(20).epsilon(0.01));
    CHECK(oracle::distance_m(w0.position.lat, w0.position.lon, mid.lat, mid.lon) ==
          doctest::Approx(seg / 2).epsilon(0.001));
    CHECK_FALSE(wearing_at(plan, th::at("2021-06-01T08:59:00Z")));
    CHECK(wearing_at(plan, th::at("2021-06-01T09:00:30Z")));
    auto stream = sample_stream(sc, plan);
    CHECK(stream.size() == 61);
    CHECK(stream.front().visible_markers.count("poster_1") == 1);
    CHECK(stream[10].visible_markers.empty());
}

TEST_CASE("run: one direct message") {
    auto sc = parse_scenario(minimal());
    auto log = run(sc);
    int playback = 0, notify = 0;
    for (auto& f : log.frames) {
        playback += f.frame.kind == FrameKind::Playback;
        notify += f.frame.kind == FrameKind::ReactionNotify;
    }
    CHECK(playback == 1);
    CHECK(notify == 1);
    auto states = log.terminal_states();
    REQUIRE(states.size() == 1);
    CHECK(states.begin()->second == MessageState::Reacted);
    CHECK(run(sc).serialize() == log.serialize());
    CHECK(parse_run_log(log.serialize()).serialize() == log.serialize());
}

TEST_CASE("every committed scenario loads and runs") {
    int n = 0;
    for (auto& e : std::filesystem::recursive_directory_iterator(WANDRELAY_SOURCE_DIR "/scenarios")) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        auto sc = load_scenario(e.path());
        auto log = run(sc);
        CHECK(log.terminal_states().size() == sc.sender_script.size());
        ++n;
    }
    CHECK(n >= 14);
}
