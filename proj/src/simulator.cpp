#include "wandrelay/simulator.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "wandrelay/codec.hpp"
#include "wandrelay/endpoint.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay {

namespace {

using nlohmann::json;

struct ActiveCapture {
    std::string message_id;
    Timestamp started_at;
    Timestamp deadline;
    std::vector<ScriptedUtterance> utterances;
    std::size_t utterances_sent = 0;
    ConsentAnswer answer = ConsentAnswer::Yes;
    bool answered = false;
};

struct RecipientClient {
    const RecipientPlan* plan = nullptr;
    Connection conn;
    std::deque<ActiveCapture> captures;  // front is the live one
};

struct Event {
    Timestamp t;
    int phase;  // 0 = sender submission, 1 = recipient sample
    std::size_t index;
    std::size_t seq;
};

class Run {
public:
    Run(const Scenario& scenario, const RunOptions& options)
        : scenario_(scenario),
          service_(ServiceOptions{options.data_dir, scenario.marker_ids()}),
          endpoint_(service_),
          ids_(options.seed_override.value_or(scenario.seed)) {
        service_.set_transition_observer([this](const TransitionNotice& n) {
            log_internal(Frame{FrameKind::Transition,
                               {{"message_id", n.message_id},
                                {"from", to_string(n.from)},
                                {"to", to_string(n.to)}}},
                         n.at);
        });
    }

    RunLog execute() {
        const Timestamp start = start_time();
        for (const auto& sender : scenario_.senders()) {
            auto& conn = senders_[sender];
            send(conn, Frame{FrameKind::Hello, {{"role", "sender"}, {"principal", sender}}}, start);
        }
        for (const auto& plan : scenario_.recipients) {
            auto& client = recipients_[plan.principal];
            client.plan = &plan;
            send(client.conn, Frame{FrameKind::Hello, {{"role", "recipient"}, {"principal", plan.principal}}},
                 start);
        }

        std::vector<Event> events;
        std::size_t seq = 0;
        for (std::size_t i = 0; i < scenario_.sender_script.size(); ++i) {
            events.push_back({scenario_.sender_script[i].at, 0, i, seq++});
        }
        std::vector<std::vector<ContextSample>> streams;
        for (std::size_t r = 0; r < scenario_.recipients.size(); ++r) {
            streams.push_back(sample_stream(scenario_, scenario_.recipients[r]));
        }
        // Merge recipient streams lazily: one event per sample.
        for (std::size_t r = 0; r < streams.size(); ++r) {
            for (std::size_t k = 0; k < streams[r].size(); ++k) {
                events.push_back({streams[r][k].t, 1, (r << 32) | k, seq++});
            }
        }
        std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
            if (a.t != b.t) return a.t < b.t;
            if (a.phase != b.phase) return a.phase < b.phase;
            return a.seq < b.seq;
        });

        for (const auto& e : events) {
            if (e.phase == 0) {
                submit(scenario_.sender_script[e.index]);
            } else {
                const std::size_t r = e.index >> 32;
                const std::size_t k = e.index & 0xFFFFFFFFu;
                step(recipients_.at(scenario_.recipients[r].principal), streams[r][k]);
            }
        }

        const auto closed = service_.close_out(scenario_.end);
        for (const auto& id : closed.discarded_captures) erase_reaction_frames(id);

        for (const auto& sender : scenario_.senders()) {
            send(senders_.at(sender), Frame{FrameKind::SenderViewReq, {{"sender_id", sender}}}, scenario_.end);
        }

        auto all = service_.messages();
        std::sort(all.begin(), all.end(), [](const StoredMessage& a, const StoredMessage& b) {
            return delivery_order_less(a.message, b.message);
        });
        for (const auto& m : all) {
            log_internal(Frame{FrameKind::FinalState,
                               {{"message_id", m.message.message_id}, {"state", to_string(m.message.state)}}},
                         scenario_.end);
        }

        RunLog out;
        out.frames = std::move(log_);
        return out;
    }

private:
    Timestamp start_time() const {
        Timestamp t = scenario_.end;
        for (const auto& r : scenario_.recipients) t = std::min(t, r.trajectory.front().t);
        for (const auto& s : scenario_.sender_script) t = std::min(t, s.at);
        return t;
    }

    void submit(const ScriptedMessage& script) {
        auto message = compose(script.args, scenario_.marker_ids(), ids_, script.at);
        refs_[message.message_id] = script.ref;
        send(senders_.at(script.args.sender_id), Frame{FrameKind::Submit, {{"message", codec::encode(message)}}},
             script.at);
    }

    void step(RecipientClient& client, const ContextSample& sample) {
        send(client.conn, Frame{FrameKind::Context, {{"sample", codec::encode(sample)}}}, sample.t, &client);
        if (client.captures.empty()) return;

        auto& cap = client.captures.front();
        if (sample.t >= cap.started_at && sample.t <= cap.deadline) {
            SceneFrame frame{sample.t, sample.position, sample.visible_markers};
            send(client.conn, Frame{FrameKind::ReactionFrame, {{"message_id", cap.message_id}, {"frame", codec::encode(frame)}}},
                 sample.t, &client);
        }
        while (cap.utterances_sent < cap.utterances.size()) {
            const auto& u = cap.utterances[cap.utterances_sent];
            const Timestamp ut = cap.started_at + seconds_to_millis(u.offset);
            if (ut > sample.t) break;
            send(client.conn,
                 Frame{FrameKind::ReactionFrame,
                       {{"message_id", cap.message_id}, {"utterance", codec::encode(Utterance{ut, u.transcript})}}},
                 sample.t, &client);
            ++cap.utterances_sent;
        }
        if (sample.t >= cap.deadline && !cap.answered) {
            cap.answered = true;
            if (cap.answer == ConsentAnswer::None) return;  // left unanswered; discarded at close-out
            const std::string id = cap.message_id;
            const auto answer = cap.answer;
            client.captures.pop_front();
            send(client.conn,
                 Frame{FrameKind::Consent,
                       {{"message_id", id}, {"answer", answer == ConsentAnswer::Yes ? "Yes" : "No"},
                        {"t", format_rfc3339(sample.t)}}},
                 sample.t, &client);
            if (answer == ConsentAnswer::No) erase_reaction_frames(id);
        }
    }

    void send(Connection& conn, const Frame& frame, Timestamp at, RecipientClient* client = nullptr) {
        const Role role = frame.kind == FrameKind::Hello
                              ? role_from_string(frame.payload.at("role").get<std::string>()).value()
                              : conn.role.value_or(Role::Recipient);
        const std::string peer =
            frame.kind == FrameKind::Hello ? frame.payload.at("principal").get<std::string>() : conn.principal;
        log_.push_back({Route{Direction::Inbound, peer, role, at}, frame});
        if (frame.kind == FrameKind::ReactionFrame) {
            reaction_frames_[frame.payload.at("message_id").get<std::string>()].push_back(log_.size() - 1);
        }

        for (auto& out : endpoint_.handle(conn, frame)) {
            log_.push_back({Route{Direction::Outbound, out.peer, out.role, at}, out.frame});
            if (out.frame.kind == FrameKind::Error) {
                throw SimulationAborted(out.frame.payload.value("code", std::string("Error")),
                                        out.frame.payload.value("detail", std::string{}) + " (peer " + out.peer +
                                            " at " + format_rfc3339(at) + ")");
            }
            if (out.frame.kind == FrameKind::ReactionStart && client != nullptr) {
                start_capture(*client, out.frame.payload);
            }
        }
    }

    void start_capture(RecipientClient& client, const json& payload) {
        ActiveCapture cap;
        cap.message_id = payload.at("message_id").get<std::string>();
        cap.started_at = parse_rfc3339(payload.at("started_at").get<std::string>());
        cap.deadline = parse_rfc3339(payload.at("deadline").get<std::string>());
        const auto& policy = scenario_.consent_policy;
        cap.answer = policy.default_answer;
        cap.utterances = policy.default_utterances;
        if (const auto* r = policy.find(refs_.at(cap.message_id))) {
            cap.answer = r->answer;
            cap.utterances = r->utterances;
        }
        std::stable_sort(cap.utterances.begin(), cap.utterances.end(),
                         [](const ScriptedUtterance& a, const ScriptedUtterance& b) { return a.offset < b.offset; });
        client.captures.push_back(std::move(cap));
    }

    void log_internal(Frame frame, Timestamp at) {
        log_.push_back({Route{Direction::Internal, {}, Role::Recipient, at}, std::move(frame)});
    }

    // Declined or unanswered captures leave nothing behind, in the log included.
    void erase_reaction_frames(const std::string& message_id) {
        auto it = reaction_frames_.find(message_id);
        if (it == reaction_frames_.end()) return;
        for (std::size_t idx : it->second) erased_.insert(idx);
        reaction_frames_.erase(it);
        std::vector<LoggedFrame> kept;
        kept.reserve(log_.size());
        std::map<std::size_t, std::size_t> remap;
        for (std::size_t i = 0; i < log_.size(); ++i) {
            if (erased_.contains(i)) continue;
            remap[i] = kept.size();
            kept.push_back(std::move(log_[i]));
        }
        for (auto& [_, idxs] : reaction_frames_) {
            for (auto& idx : idxs) idx = remap.at(idx);
        }
        log_ = std::move(kept);
        erased_.clear();
    }

    const Scenario& scenario_;
    DeliveryService service_;
    Endpoint endpoint_;
    MessageIdGenerator ids_;
    std::map<std::string, Connection> senders_;
    std::map<std::string, RecipientClient> recipients_;
    std::map<std::string, std::string> refs_;  // message id -> script ref
    std::vector<LoggedFrame> log_;
    std::map<std::string, std::vector<std::size_t>> reaction_frames_;
    std::set<std::size_t> erased_;
};

}  // namespace

RunLog run(const Scenario& scenario, const RunOptions& options) {
    Run r(scenario, options);
    return r.execute();
}

}  // namespace wandrelay
