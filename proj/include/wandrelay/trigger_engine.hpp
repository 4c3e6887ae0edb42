#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wandrelay/geo.hpp"
#include "wandrelay/message.hpp"
#include "wandrelay/time.hpp"

namespace wandrelay {

struct ContextSample {
    std::string recipient_id;
    Timestamp t;
    LatLon position;
    bool wearing = false;
    MarkerSet visible_markers;

    friend bool operator==(const ContextSample&, const ContextSample&) = default;
};

// One flag per condition the schedule declares; absent otherwise.
struct ConditionResult {
    std::optional<bool> geofence_hit;
    std::optional<bool> window_hit;
    std::optional<bool> marker_hit;

    bool all_true() const noexcept;
    bool any_true() const noexcept;

    friend bool operator==(const ConditionResult&, const ConditionResult&) = default;
};

struct DeliveryRecord {
    std::string message_id;
    Timestamp delivered_at;
    ContextSample triggering_sample;
    ConditionResult satisfied;

    friend bool operator==(const DeliveryRecord&, const DeliveryRecord&) = default;
};

bool geofence_contains(const Geofence& fence, const LatLon& p) noexcept;
bool window_contains(const TimeWindow& window, Timestamp t) noexcept;

// Tests every declared condition against this one sample.
ConditionResult evaluate_conditions(const TriggerSchedule& schedule, const ContextSample& sample);

// Would this message fire at this sample? Wearing is required, and a message
// can't fire before it exists.
std::optional<ConditionResult> fires_at(const ArMessage& message, const ContextSample& sample);

struct EvaluationResult {
    std::vector<DeliveryRecord> deliveries;  // ordered by (created_at, message_id)
    std::vector<ArMessage> still_pending;
};

// Pure single-sample step. `last_t` is the recipient's previously processed
// sample time; a sample that is not strictly newer throws OutOfOrderSample.
EvaluationResult evaluate_sample(const ContextSample& sample, std::span<const ArMessage> pending,
                                 std::optional<Timestamp> last_t = std::nullopt);

struct ExpiryResult {
    std::vector<ArMessage> expired;
    std::vector<ArMessage> still_pending;
};

// A pending message expires once no future sample can satisfy it: a Specific
// schedule whose window has closed, or a Flexible one made only of closed
// windows. Geofence and marker conditions never expire on their own.
bool can_never_fire(const TriggerSchedule& schedule, Timestamp now) noexcept;
ExpiryResult expire_messages(Timestamp now, std::span<const ArMessage> pending);

}  // namespace wandrelay
