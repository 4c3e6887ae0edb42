#include "wandrelay/trigger_engine.hpp"

#include <algorithm>

#include "wandrelay/error.hpp"

namespace wandrelay {

bool ConditionResult::all_true() const noexcept {
    return geofence_hit.value_or(true) && window_hit.value_or(true) && marker_hit.value_or(true);
}

bool ConditionResult::any_true() const noexcept {
    return geofence_hit.value_or(false) || window_hit.value_or(false) || marker_hit.value_or(false);
}

bool geofence_contains(const Geofence& fence, const LatLon& p) noexcept {
    return haversine_distance(fence.center, p) <= fence.radius;
}

bool window_contains(const TimeWindow& window, Timestamp t) noexcept {
    return window.start <= t && t <= window.end;
}

ConditionResult evaluate_conditions(const TriggerSchedule& schedule, const ContextSample& sample) {
    ConditionResult r;
    if (schedule.geofence) r.geofence_hit = geofence_contains(*schedule.geofence, sample.position);
    if (schedule.window) r.window_hit = window_contains(*schedule.window, sample.t);
    if (schedule.marker) r.marker_hit = sample.visible_markers.contains(schedule.marker->marker_id);
    return r;
}

std::optional<ConditionResult> fires_at(const ArMessage& message, const ContextSample& sample) {
    if (!sample.wearing || sample.t < message.created_at) return std::nullopt;
    if (message.is_direct()) return ConditionResult{};

    const auto& schedule = *message.schedule;
    ConditionResult r = evaluate_conditions(schedule, sample);
    const bool hit = schedule.specificity == Specificity::Specific ? r.all_true() : r.any_true();
    if (!hit) return std::nullopt;
    return r;
}

EvaluationResult evaluate_sample(const ContextSample& sample, std::span<const ArMessage> pending,
                                 std::optional<Timestamp> last_t) {
    if (last_t && !(sample.t > *last_t)) {
        throw Error(Errc::OutOfOrderSample, "sample at " + format_rfc3339(sample.t) +
                                                " is not after " + format_rfc3339(*last_t));
    }

    EvaluationResult out;
    std::vector<const ArMessage*> fired;
    std::vector<ConditionResult> results;
    for (const auto& m : pending) {
        if (auto r = fires_at(m, sample)) {
            fired.push_back(&m);
            results.push_back(*r);
        } else {
            out.still_pending.push_back(m);
        }
    }

    std::vector<std::size_t> order(fired.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return delivery_order_less(*fired[a], *fired[b]);
    });
    for (std::size_t i : order) {
        out.deliveries.push_back({fired[i]->message_id, sample.t, sample, results[i]});
    }
    return out;
}

bool can_never_fire(const TriggerSchedule& schedule, Timestamp now) noexcept {
    const bool window_closed = schedule.window && schedule.window->end < now;
    if (schedule.specificity == Specificity::Specific || !schedule.is_compound()) {
        return window_closed;
    }
    // Flexible: only the window can close, so every declared condition must
    // be a (closed) window.
    return window_closed && !schedule.geofence && !schedule.marker;
}

ExpiryResult expire_messages(Timestamp now, std::span<const ArMessage> pending) {
    ExpiryResult out;
    for (const auto& m : pending) {
        if (m.schedule && can_never_fire(*m.schedule, now)) {
            out.expired.push_back(m);
        } else {
            out.still_pending.push_back(m);
        }
    }
    return out;
}

}  // namespace wandrelay
