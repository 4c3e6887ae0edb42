#include "helpers.hpp"

#include "../oracles/oracles.hpp"

using namespace wandrelay;

namespace {
const LatLon kCenter{47.6062, -122.3321};
LatLon north(double meters) { return {kCenter.lat + meters / 111195.0, kCenter.lon}; }
}  // namespace

TEST_CASE("geofence_contains") {
    CHECK(geofence_contains({kCenter, 7}, kCenter));
    // Pick the point whose library distance is exactly the radius.
    LatLon edge = north(10);
    Geofence g{kCenter, haversine_distance(kCenter, edge)};
    CHECK(geofence_contains(g, edge));
    LatLon far = north(20);
    CHECK(oracle::distance_m(kCenter.lat, kCenter.lon, far.lat, far.lon) == doctest::Approx(20).epsilon(0.01));
    CHECK_FALSE(geofence_contains({kCenter, 14}, far));
}

TEST_CASE("window_contains") {
    TimeWindow w{th::at("2021-06-01T09:00:00Z"), th::at("2021-06-01T10:00:00Z")};
    CHECK(window_contains(w, w.start));
    CHECK(window_contains(w, w.end));
    CHECK_FALSE(window_contains(w, w.end + Millis{1000}));
    CHECK(window_contains(w, th::at("2021-06-01T09:30:00Z")));
    CHECK_FALSE(window_contains(w, w.start - Millis{1}));
}

TEST_CASE("evaluate_sample: direct message") {
    auto t = th::at("2021-06-01T09:00:00Z");
    std::vector<ArMessage> pending{th::message("m1", t)};
    auto r = evaluate_sample(th::sample(t, kCenter), pending);
    REQUIRE(r.deliveries.size() == 1);
    CHECK(r.deliveries[0].message_id == "m1");
    CHECK(r.still_pending.empty());
    auto off = evaluate_sample(th::sample(t, kCenter, false), pending);
    CHECK(off.deliveries.empty());
    CHECK(off.still_pending.size() == 1);
}

TEST_CASE("evaluate_sample: Specific needs both conditions on one sample") {
    auto t0 = th::at("2021-06-01T09:00:00Z");
    TriggerSchedule s;
    s.geofence = Geofence{kCenter, 10};
    s.window = TimeWindow{t0 + Millis{60000}, t0 + Millis{120000}};
    std::vector<ArMessage> pending{th::message("m1", t0, s)};
    std::vector<ContextSample> stream{th::sample(t0 + Millis{1000}, kCenter),
                                      th::sample(t0 + Millis{61000}, north(30)),
                                      th::sample(t0 + Millis{90000}, kCenter)};
    auto oracle_hits = oracle::first_deliveries(pending, stream);
    REQUIRE(oracle_hits.size() == 1);

    auto r1 = evaluate_sample(stream[0], pending);
    CHECK(r1.deliveries.empty());
    auto r2 = evaluate_sample(stream[1], r1.still_pending, stream[0].t);
    CHECK(r2.deliveries.empty());
    auto r3 = evaluate_sample(stream[2], r2.still_pending, stream[1].t);
    REQUIRE(r3.deliveries.size() == 1);
    CHECK(r3.deliveries[0].delivered_at == oracle_hits["m1"]);
    CHECK(r3.deliveries[0].satisfied.geofence_hit == true);
    CHECK(r3.deliveries[0].satisfied.window_hit == true);
    CHECK_FALSE(r3.deliveries[0].satisfied.marker_hit.has_value());
}

TEST_CASE("evaluate_sample: Flexible fires on the marker alone") {
    auto t0 = th::at("2021-06-01T09:00:00Z");
    TriggerSchedule s;
    s.window = TimeWindow{t0 + Millis{600000}, t0 + Millis{700000}};
    s.marker = MarkerCondition{"poster_1"};
    s.specificity = Specificity::Flexible;
    std::vector<ArMessage> pending{th::message("m1", t0, s)};
    auto x = th::sample(t0 + Millis{1000}, kCenter, true, {"poster_1"});
    REQUIRE(oracle::fires(pending[0], x));
    auto r = evaluate_sample(x, pending);
    REQUIRE(r.deliveries.size() == 1);
    CHECK(r.deliveries[0].satisfied.window_hit == false);
    CHECK(r.deliveries[0].satisfied.marker_hit == true);
}

TEST_CASE("evaluate_sample: ordering, creation guard, out of order") {
    auto t0 = th::at("2021-06-01T09:00:00Z");
    std::vector<ArMessage> pending{th::message("b", t0 + Millis{5}), th::message("z", t0),
                                   th::message("a", t0 + Millis{5}), th::message("late", t0 + Millis{99999})};
    auto r = evaluate_sample(th::sample(t0 + Millis{10}, kCenter), pending);
    REQUIRE(r.deliveries.size() == 3);
    CHECK(r.deliveries[0].message_id == "z");
    CHECK(r.deliveries[1].message_id == "a");
    CHECK(r.deliveries[2].message_id == "b");
    REQUIRE(r.still_pending.size() == 1);
    CHECK(r.still_pending[0].message_id == "late");
    CHECK_ERRC(evaluate_sample(th::sample(t0, kCenter), pending, t0), Errc::OutOfOrderSample);
}

TEST_CASE("expire_messages") {
    TriggerSchedule spec;
    spec.window = TimeWindow{th::at("2021-06-01T08:00:00Z"), th::at("2021-06-01T09:00:00Z")};
    spec.geofence = Geofence{kCenter, 10};
    TriggerSchedule flex = spec;
    flex.specificity = Specificity::Flexible;
    TriggerSchedule window_only;
    window_only.window = spec.window;
    window_only.specificity = Specificity::Flexible;
    auto t = th::at("2021-06-01T07:00:00Z");
    std::vector<ArMessage> pending{th::message("spec", t, spec), th::message("flex", t, flex),
                                   th::message("closed", t, window_only), th::message("direct", t)};

    auto r1 = expire_messages(th::at("2021-06-01T09:01:00Z"), pending);
    std::set<std::string> expired;
    for (auto& m : r1.expired) expired.insert(m.message_id);
    CHECK(expired == std::set<std::string>{"spec", "closed"});

    auto r2 = expire_messages(th::at("2021-06-01T10:00:00Z"), std::vector<ArMessage>{pending[1]});
    CHECK(r2.expired.empty());
    CHECK(r2.still_pending.size() == 1);

    auto r3 = expire_messages(th::at("2021-06-01T09:00:00Z"), std::vector<ArMessage>{pending[0]});
    CHECK(r3.expired.empty());
}

TEST_CASE("evaluate_sample matches the brute-force oracle on random streams") {
    std::mt19937_64 rng(2024);
    auto t0 = th::at("2021-06-01T09:00:00Z");
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ArMessage> msgs;
        int n = 1 + rng() % 12;
        for (int i = 0; i < n; ++i) {
            std::optional<TriggerSchedule> s;
            if (rng() % 5) {
                TriggerSchedule x;
                if (rng() % 2) x.geofence = Geofence{north(double(rng() % 60)), 7 + double(rng() % 8)};
                if (rng() % 2) {
                    auto a = t0 + Millis{1000 * int(rng() % 60)};
                    x.window = TimeWindow{a, a + Millis{1000 * int(1 + rng() % 20)}};
                }
                if (rng() % 2 || x.condition_count() == 0) x.marker = MarkerCondition{"poster_" + std::to_string(1 + rng() % 3)};
                x.specificity = rng() % 2 ? Specificity::Flexible : Specificity::Specific;
                s = x;
            }
            msgs.push_back(th::message("m" + std::to_string(i), t0 + Millis{1000 * int(rng() % 30)}, s));
        }
        std::vector<ContextSample> stream;
        for (int k = 0; k < 80; ++k) {
            MarkerSet vis;
            if (rng() % 4 == 0) vis.insert("poster_" + std::to_string(1 + rng() % 3));
            stream.push_back(th::sample(t0 + Millis{1000 * k}, north(double(rng() % 70)), rng() % 3 != 0, vis));
        }
        auto expect = oracle::first_deliveries(msgs, stream);
        std::map<std::string, Timestamp> got;
        std::vector<ArMessage> pending = msgs;
        std::optional<Timestamp> last;
        for (auto& x : stream) {
            auto r = evaluate_sample(x, pending, last);
            for (auto& d : r.deliveries) {
                CHECK(got.count(d.message_id) == 0);
                got[d.message_id] = d.delivered_at;
            }
            pending = r.still_pending;
            last = x.t;
        }
        CHECK(got == expect);
    }
}
