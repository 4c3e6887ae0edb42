#include "helpers.hpp"

#include "wandrelay/codec.hpp"
#include "wandrelay/endpoint.hpp"
#include "wandrelay/protocol.hpp"
#include "wandrelay/service.hpp"

using namespace wandrelay;

TEST_CASE("frame codec") {
    Frame f{FrameKind::Hello, {{"role", "sender"}, {"principal", "s1"}}};
    auto line = encode_frame(f);
    CHECK(line.find('\n') == std::string::npos);
    auto back = decode_frame(line);
    CHECK(back.kind == FrameKind::Hello);
    CHECK(back.payload == f.payload);
    CHECK_ERRC(decode_frame("{\"v\":2,\"kind\":\"HELLO\",\"payload\":{}}"), Errc::ProtocolError);
    CHECK_ERRC(decode_frame("{\"v\":1,\"kind\":\"NOPE\",\"payload\":{}}"), Errc::ProtocolError);
    CHECK_ERRC(decode_frame("garbage"), Errc::ProtocolError);
}

TEST_CASE("endpoint turns service errors into ERROR frames") {
    DeliveryService svc;
    Endpoint ep(svc);
    Connection sender, recipient;
    auto hello = [&](Connection& c, const char* role, const char* who) {
        auto out = ep.handle(c, Frame{FrameKind::Hello, {{"role", role}, {"principal", who}}});
        REQUIRE(out.size() == 1);
        CHECK(out[0].frame.kind == FrameKind::Ack);
    };
    hello(sender, "sender", "s1");
    hello(recipient, "recipient", "r1");

    auto t = th::at("2021-06-01T09:00:00Z");
    auto m = th::message("01F7DPD1M0Y06SBM4FDEK9J3DC", t);
    auto out = ep.handle(sender, Frame{FrameKind::Submit, {{"message", codec::encode(m)}}});
    REQUIRE(out.size() == 1);
    CHECK(out[0].frame.kind == FrameKind::Ack);
    out = ep.handle(sender, Frame{FrameKind::Submit, {{"message", codec::encode(m)}}});
    REQUIRE(out.size() == 1);
    CHECK(out[0].frame.kind == FrameKind::Error);
    CHECK(out[0].frame.payload["code"] == "DuplicateMessageId");

    auto forged = m;
    forged.message_id = "01F7DPD1M0Y06SBM4FDEK9J3DD";
    forged.sender_id = "r1";
    forged.recipient_id = "s1";
    out = ep.handle(sender, Frame{FrameKind::Submit, {{"message", codec::encode(forged)}}});
    CHECK(out.at(0).frame.kind == FrameKind::Error);

    out = ep.handle(recipient, Frame{FrameKind::Context, {{"sample", codec::encode(th::sample(t + Millis{1000}, {1, 1}))}}});
    REQUIRE(out.size() == 2);
    CHECK(out[0].frame.kind == FrameKind::Playback);
    CHECK(out[1].frame.kind == FrameKind::ReactionStart);

    out = ep.handle(recipient, Frame{FrameKind::Consent, {{"message_id", m.message_id}, {"answer", "Yes"},
                                                          {"t", "2021-06-01T09:00:11Z"}}});
    bool notified = false;
    for (auto& o : out)
        if (o.frame.kind == FrameKind::ReactionNotify) {
            notified = true;
            CHECK(o.peer == "s1");
            CHECK_FALSE(o.reply);
        }
    CHECK(notified);

    out = ep.handle(sender, Frame{FrameKind::SenderViewReq, nlohmann::json::object()});
    REQUIRE(out.size() == 1);
    CHECK(out[0].frame.kind == FrameKind::SenderViewResp);
    CHECK(out[0].frame.payload["records"].size() == 1);

    Connection anon;
    out = ep.handle(anon, Frame{FrameKind::SenderViewReq, nlohmann::json::object()});
    CHECK(out.at(0).frame.kind == FrameKind::Error);
}
