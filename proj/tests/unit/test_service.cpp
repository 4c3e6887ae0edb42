#include "helpers.hpp"

#include <regex>

#include "wandrelay/codec.hpp"
#include "wandrelay/service.hpp"

using namespace wandrelay;

namespace {
const Timestamp kT0 = th::at("2021-06-01T09:00:00Z");
const LatLon kHere{47.6062, -122.3321};
Millis s(int sec) { return Millis{1000 * sec}; }

std::unique_ptr<DeliveryService> make() {
    ServiceOptions o;
    o.declared_markers = th::posters();
    auto svc = std::make_unique<DeliveryService>(o);
    svc->register_principal("s1");
    svc->register_principal("r1");
    return svc;
}

TriggerSchedule window(Timestamp a, Timestamp b, Specificity sp = Specificity::Specific) {
    TriggerSchedule x;
    x.window = TimeWindow{a, b};
    x.specificity = sp;
    return x;
}
}  // namespace

TEST_CASE("submit") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.submit(th::message("m1", kT0));
    CHECK(svc.pending_count("r1") == 1);
    CHECK_ERRC(svc.submit(th::message("m1", kT0)), Errc::DuplicateMessageId);
    CHECK_ERRC(svc.submit(th::message("m2", kT0, std::nullopt, "s1", "nobody")), Errc::UnknownRecipient);
    CHECK(svc.pending_count("r1") == 1);
}

TEST_CASE("push_context") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.open_session("r1");
    TriggerSchedule flex;
    flex.marker = MarkerCondition{"poster_1"};
    flex.geofence = Geofence{{0, 0}, 10};
    flex.specificity = Specificity::Flexible;
    svc.submit(th::message("a", kT0, flex));
    svc.submit(th::message("b", kT0 + Millis{1}, window(kT0 + s(100), kT0 + s(200))));
    svc.submit(th::message("c", kT0, window(kT0 + s(100), kT0 + s(200))));

    auto off = svc.push_context(th::sample(kT0 + s(150), kHere, false, {"poster_1"}));
    CHECK(off.playback.empty());
    CHECK(svc.pending_count("r1") == 3);

    auto one = svc.push_context(th::sample(kT0 + s(151), kHere, true, {"poster_1"}));
    // a fires by marker; b and c by window, in (created_at, id) order
    REQUIRE(one.playback.size() == 3);
    CHECK(one.playback[0].message_id == "a");
    CHECK(one.playback[1].message_id == "c");
    CHECK(one.playback[2].message_id == "b");
    CHECK(one.playback[0].render_at == one.playback[0].flash_at + kFlashDuration);
    CHECK(one.captures_started.size() == 1);
    CHECK_ERRC(svc.push_context(th::sample(kT0 + s(151), kHere)), Errc::OutOfOrderSample);
    CHECK_ERRC(svc.push_context(th::sample(kT0 + s(152), kHere, true, {}, "s1")), Errc::NoSession);
}

TEST_CASE("push_context: one flexible schedule gives one event") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.open_session("r1");
    TriggerSchedule flex;
    flex.window = TimeWindow{kT0, kT0 + s(60)};
    flex.marker = MarkerCondition{"poster_2"};
    flex.specificity = Specificity::Flexible;
    svc.submit(th::message("f", kT0, flex));
    svc.submit(th::message("never", kT0, window(kT0 + s(500), kT0 + s(600))));
    auto r = svc.push_context(th::sample(kT0 + s(5), kHere));
    CHECK(r.playback.size() == 1);
}

TEST_CASE("consent, sender_view and notify_reaction") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.open_session("r1");
    svc.submit(th::message("yes", kT0));
    svc.submit(th::message("no", kT0 + Millis{1}));
    svc.submit(th::message("wait", kT0, window(kT0 + s(3600), kT0 + s(7200))));
    svc.push_context(th::sample(kT0 + s(1), kHere));
    svc.reaction_frame("yes", SceneFrame{kT0 + s(2), kHere, MarkerSet{"poster_3"}});
    svc.reaction_utterance("yes", Utterance{kT0 + s(3), "ha"});
    CHECK_ERRC(svc.consent("yes", Consent::Yes, kT0 + s(5)), Errc::NotAwaitingConsent);
    auto y = svc.consent("yes", Consent::Yes, kT0 + s(11));
    CHECK(y.sender_id == "s1");
    REQUIRE(y.forwarded);
    REQUIRE(y.next_capture);
    CHECK(y.next_capture->message_id == "no");
    CHECK(svc.has_unseen_reactions("s1"));

    svc.reaction_utterance("no", Utterance{kT0 + s(14), "SENTINEL-private"});
    auto n = svc.consent("no", Consent::No, kT0 + s(21));
    CHECK_FALSE(n.forwarded);
    CHECK(svc.dump_state().find("SENTINEL") == std::string::npos);

    auto view = svc.sender_view("s1");
    CHECK_FALSE(svc.has_unseen_reactions("s1"));
    std::map<std::string, SenderVisibleRecord> by_id;
    for (auto& r : view) by_id[r.message_id] = r;
    CHECK(by_id["yes"].state == MessageState::Reacted);
    CHECK(by_id["yes"].reaction.has_value());
    CHECK(by_id["no"].state == MessageState::ReactionDeclined);
    CHECK_FALSE(by_id["no"].reaction.has_value());
    CHECK(by_id["wait"].state == MessageState::Pending);

    std::string text;
    for (auto& r : view) text += codec::encode(r).dump();
    CHECK(text.find("lat") == std::string::npos);
    CHECK(text.find("lon") == std::string::npos);
    CHECK(text.find("poster_") == std::string::npos);
    CHECK_FALSE(std::regex_search(text, std::regex(R"(-?\d{1,3}\.\d{4,})")));

    ReactionRecord rec = *y.forwarded;
    CHECK_ERRC(svc.notify_reaction(rec), Errc::AlreadyReacted);
    rec.message_id = "wait";
    CHECK_ERRC(svc.notify_reaction(rec), Errc::NotDelivered);
    rec.message_id = "ghost";
    CHECK_ERRC(svc.notify_reaction(rec), Errc::UnknownMessage);
}

TEST_CASE("notify_reaction moves Delivered to Reacted") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.open_session("r1");
    svc.submit(th::message("m", kT0));
    svc.push_context(th::sample(kT0 + s(1), kHere));
    ReactionRecord rec;
    rec.message_id = "m";
    rec.started_at = kT0 + s(1);
    svc.notify_reaction(rec);
    CHECK(svc.find("m")->message.state == MessageState::Reacted);
}

TEST_CASE("close_out discards live captures and expires pending") {
    auto svc_ = make();
    auto& svc = *svc_;
    svc.open_session("r1");
    svc.submit(th::message("d", kT0));
    svc.submit(th::message("p", kT0, window(kT0 + s(3600), kT0 + s(7200))));
    std::vector<TransitionNotice> seen;
    svc.set_transition_observer([&](const TransitionNotice& n) { seen.push_back(n); });
    svc.push_context(th::sample(kT0 + s(1), kHere));
    svc.reaction_utterance("d", Utterance{kT0 + s(2), "SENTINEL-unanswered"});
    auto r = svc.close_out(kT0 + s(100));
    CHECK(r.discarded_captures == std::vector<std::string>{"d"});
    CHECK(r.expired == std::vector<std::string>{"p"});
    CHECK(svc.find("d")->message.state == MessageState::ReactionDeclined);
    CHECK(svc.find("p")->message.state == MessageState::Expired);
    CHECK(seen.size() == 3);
    CHECK(svc.dump_state().find("SENTINEL") == std::string::npos);
}

TEST_CASE("sessions supersede") {
    auto svc_ = make();
    auto& svc = *svc_;
    auto a = svc.open_session("r1");
    auto b = svc.open_session("r1");
    CHECK_FALSE(svc.session_is_current("r1", a));
    CHECK(svc.session_is_current("r1", b));
    svc.close_session("r1", a);
    CHECK(svc.session_is_current("r1", b));
    svc.close_session("r1", b);
    CHECK_ERRC(svc.push_context(th::sample(kT0, kHere)), Errc::NoSession);
    CHECK_ERRC(svc.open_session("ghost"), Errc::UnknownRecipient);
}
