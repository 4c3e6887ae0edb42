#include "helpers.hpp"

#include "wandrelay/codec.hpp"

using namespace wandrelay;

namespace {
ComposeArgs args(std::string content, double note, std::optional<TriggerSchedule> s = std::nullopt) {
    ComposeArgs a;
    a.sender_id = "s1";
    a.recipient_id = "r1";
    a.content_id = std::move(content);
    a.voice_note = {note, "hello"};
    a.schedule = std::move(s);
    return a;
}
}  // namespace

TEST_CASE("compose") {
    MessageIdGenerator ids(1);
    auto now = th::at("2021-06-01T09:00:00Z");
    auto m = compose(args("dog", 3), {}, ids, now);
    CHECK(m.state == MessageState::Pending);
    CHECK(m.is_direct());
    CHECK(m.created_at == now);
    CHECK(is_ulid(m.message_id));

    TriggerSchedule wide;
    wide.geofence = Geofence{{47.6, -122.3}, 20};
    CHECK_ERRC(compose(args("tree", 2, wide), {}, ids, now), Errc::RadiusOutOfRange);
    CHECK_ERRC(compose(args("ball", 11), {}, ids, now), Errc::VoiceNoteTooLong);
    CHECK_ERRC(compose(args("unicorn", 1), {}, ids, now), Errc::UnknownContent);
    auto self = args("dog", 1);
    self.recipient_id = "s1";
    CHECK_ERRC(compose(self, {}, ids, now), Errc::InvalidPrincipal);
    auto big = args("dog", 1);
    big.scale = 50;
    CHECK_ERRC(compose(big, {}, ids, now), Errc::ScaleOutOfRange);
    CHECK_NOTHROW(compose(args("ball", 10), {}, ids, now));
}

TEST_CASE("catalog") {
    const auto& c = catalog();
    CHECK(c.size() == 21);
    auto count = [&](ContentKind k) {
        return std::count_if(c.begin(), c.end(), [&](const ContentItem& i) { return i.kind == k; });
    };
    CHECK(count(ContentKind::VirtualObject) == 11);
    CHECK(count(ContentKind::Avatar) == 10);
    REQUIRE(find_content("tree"));
    CHECK(find_content("tree")->anchor == Anchor::PinnedToGround);
    REQUIRE(find_content("bee"));
    CHECK(find_content("bee")->anchor == Anchor::Floating);
}

TEST_CASE("validate_schedule") {
    TriggerSchedule s;
    s.geofence = Geofence{{47.6, -122.3}, 7};
    CHECK_NOTHROW(validate_schedule(s, {}));
    s.geofence->radius = 14;
    CHECK_NOTHROW(validate_schedule(s, {}));
    s.geofence->radius = 6.99;
    CHECK_ERRC(validate_schedule(s, {}), Errc::RadiusOutOfRange);

    TriggerSchedule w;
    auto t = th::at("2021-06-01T09:00:00Z");
    w.window = TimeWindow{t, t};
    CHECK_ERRC(validate_schedule(w, {}), Errc::InvalidWindow);
    w.window = TimeWindow{t, t - Millis{1}};
    CHECK_ERRC(validate_schedule(w, {}), Errc::InvalidWindow);

    TriggerSchedule mk;
    mk.marker = MarkerCondition{"poster_9"};
    CHECK_ERRC(validate_schedule(mk, th::posters()), Errc::UnknownMarker);
    mk.marker = MarkerCondition{"poster_8"};
    CHECK_NOTHROW(validate_schedule(mk, th::posters()));

    CHECK_ERRC(validate_schedule(TriggerSchedule{}, {}), Errc::EmptySchedule);

    TriggerSchedule bad;
    bad.geofence = Geofence{{95, 0}, 10};
    CHECK_ERRC(validate_schedule(bad, {}), Errc::InvalidCoordinate);
}

TEST_CASE("lifecycle edges") {
    using S = MessageState;
    const S all[] = {S::Pending, S::Delivered, S::Reacted, S::ReactionDeclined, S::Expired};
    int legal = 0;
    for (S a : all)
        for (S b : all) legal += is_legal_transition(a, b);
    CHECK(legal == 4);
    CHECK(is_legal_transition(S::Pending, S::Delivered));
    CHECK(is_legal_transition(S::Pending, S::Expired));
    CHECK(is_legal_transition(S::Delivered, S::Reacted));
    CHECK(is_legal_transition(S::Delivered, S::ReactionDeclined));
    CHECK_FALSE(is_legal_transition(S::Expired, S::Delivered));
}

TEST_CASE("message json round trip over random messages") {
    std::mt19937_64 rng(99);
    MessageIdGenerator ids(5);
    auto base = th::at("2021-06-01T09:00:00Z");
    const auto& cat = catalog();
    for (int i = 0; i < 300; ++i) {
        ArMessage m = th::message(ids.next(base + Millis{i}), base + Millis{int(rng() % 100000)});
        m.content_id = cat[rng() % cat.size()].content_id;
        m.scale = 0.1 + double(rng() % 990) / 100.0;
        m.voice_note = {double(rng() % 10001) / 1000.0, "note \"" + std::to_string(i) + "\"\n"};
        if (rng() % 4) {
            TriggerSchedule s;
            if (rng() % 2) s.geofence = Geofence{{double(rng() % 1800) / 10 - 90, double(rng() % 3600) / 10 - 180},
                                                   7 + double(rng() % 701) / 100};
            if (rng() % 2) s.window = TimeWindow{base + Millis{int(rng() % 1000)}, base + Millis{2000 + int(rng() % 1000)}};
            if (rng() % 2 || s.condition_count() == 0) s.marker = MarkerCondition{"poster_" + std::to_string(1 + rng() % 8)};
            s.specificity = rng() % 2 ? Specificity::Flexible : Specificity::Specific;
            if (!s.is_compound()) s.specificity = Specificity::Specific;
            m.schedule = s;
        }
        m.state = MessageState(rng() % 5);
        CHECK(codec::deserialize_message(codec::serialize(m)) == m);
    }
}

TEST_CASE("decode errors name the field") {
    auto j = nlohmann::json::parse(R"({"v":1,"message_id":"x","sender_id":"a","recipient_id":"b",
        "content_id":"dog","scale":1,"voice_note":{"duration":"long","transcript":""},
        "created_at":"2021-06-01T09:00:00Z","state":"Pending"})");
    try {
        codec::decode_message(j);
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ParseError);
        CHECK(e.detail().find("voice_note.duration") != std::string::npos);
    }
}
