#include "wandrelay/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "wandrelay/codec.hpp"
#include "wandrelay/error.hpp"

namespace wandrelay::analytics {

std::string_view to_string(Category c) noexcept {
    switch (c) {
        case Category::LocationOnly: return "location-only";
        case Category::TimeOnly: return "time-only";
        case Category::MarkerOnly: return "marker-only";
        case Category::CompoundSpecific: return "compound-specific";
        case Category::CompoundFlexible: return "compound-flexible";
        case Category::Direct: return "direct";
    }
    return "direct";
}

std::string_view column_title(Category c) noexcept {
    switch (c) {
        case Category::LocationOnly: return "Location";
        case Category::TimeOnly: return "Time";
        case Category::MarkerOnly: return "Marker";
        case Category::CompoundSpecific: return "Specific";
        case Category::CompoundFlexible: return "Flexible";
        case Category::Direct: return "Direct";
    }
    return "Direct";
}

Category categorize(const ArMessage& message) noexcept {
    if (!message.schedule) return Category::Direct;
    const auto& s = *message.schedule;
    if (s.is_compound()) {
        return s.specificity == Specificity::Specific ? Category::CompoundSpecific : Category::CompoundFlexible;
    }
    if (s.geofence) return Category::LocationOnly;
    if (s.window) return Category::TimeOnly;
    return Category::MarkerOnly;
}

Stats stats(std::span<const double> values) {
    if (values.empty()) throw Error(Errc::EmptyInput, "statistics of an empty list");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    Stats s;
    s.median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
    if (n >= 2) {
        double ss = 0.0;
        for (double v : sorted) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return s;
}

std::optional<int> CategoryCounts::rate() const noexcept {
    if (sent == 0) return std::nullopt;
    // Exact half-up rounding of 100 * delivered / sent.
    return (200 * delivered + sent) / (2 * sent);
}

std::vector<PairSummary> summarize_pairs(const RunLog& log) {
    std::map<std::string, ArMessage> submitted;  // every SUBMIT seen
    std::set<std::string> accepted;               // acknowledged SUBMITs
    std::set<std::string> played;
    std::map<std::string, MessageState> terminal;
    std::vector<std::string> order;

    for (const auto& f : log.frames) {
        const auto& p = f.frame.payload;
        switch (f.frame.kind) {
            case FrameKind::Submit: {
                auto m = codec::decode_message(codec::require(p, "message", "SUBMIT"), "SUBMIT.message");
                if (!submitted.contains(m.message_id)) order.push_back(m.message_id);
                submitted.emplace(m.message_id, std::move(m));
                break;
            }
            case FrameKind::Ack:
                if (p.value("ref", std::string{}) == "SUBMIT") accepted.insert(p.value("message_id", std::string{}));
                break;
            case FrameKind::Playback:
                played.insert(codec::require_string(codec::require(p, "event", "PLAYBACK"), "message_id", "PLAYBACK.event"));
                break;
            case FrameKind::FinalState: {
                auto state = message_state_from_string(p.value("state", std::string{}));
                if (!state) throw Error(Errc::ProtocolError, "FINAL_STATE with unknown state");
                terminal[p.value("message_id", std::string{})] = *state;
                break;
            }
            default:
                break;
        }
    }

    std::vector<PairSummary> pairs;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    for (const auto& id : order) {
        if (!accepted.contains(id)) continue;
        const auto& m = submitted.at(id);
        auto t = terminal.find(id);
        if (t == terminal.end() || t->second == MessageState::Pending) {
            throw Error(Errc::IncompleteLog, "message " + id + " has no terminal state");
        }
        const auto key = std::make_pair(m.sender_id, m.recipient_id);
        auto [it, inserted] = index.emplace(key, pairs.size());
        if (inserted) pairs.push_back(PairSummary{m.sender_id, m.recipient_id, {}});
        auto& counts = pairs[it->second].at(categorize(m));
        ++counts.sent;
        if (played.contains(id)) ++counts.delivered;
    }
    return pairs;
}

SummaryRows summary_rows(std::span<const PairSummary> pairs) {
    SummaryRows rows;
    if (pairs.empty()) return rows;
    for (std::size_t c = 0; c < kCategories.size(); ++c) {
        std::vector<double> sent;
        std::vector<double> delivered;
        std::vector<double> rates;
        for (const auto& p : pairs) {
            sent.push_back(p.by_category[c].sent);
            delivered.push_back(p.by_category[c].delivered);
            if (auto r = p.by_category[c].rate()) rates.push_back(*r);
        }
        rows.sent[c] = stats(sent);
        rows.delivered[c] = stats(delivered);
        if (!rates.empty()) rows.rate[c] = stats(rates);
    }
    return rows;
}

Report summarize(std::span<const RunLog> logs) {
    Report r;
    for (const auto& log : logs) {
        auto pairs = summarize_pairs(log);
        r.pairs.insert(r.pairs.end(), pairs.begin(), pairs.end());
    }
    r.summary = summary_rows(r.pairs);
    return r;
}

namespace {

// Up to two decimals, trailing zeros dropped: 1.50 -> 1.5, 1.00 -> 1.
std::string format_count_stat(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";
    return s;
}

std::string format_one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string format_rate(std::optional<int> r) { return r ? std::to_string(*r) + "%" : "N/A"; }

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

enum class StatKind { Median, Mean, Sd };

std::string stat_cell(const std::optional<Stats>& s, StatKind k, bool percent) {
    if (!s) return "N/A";
    double v = 0.0;
    switch (k) {
        case StatKind::Median: v = s->median; break;
        case StatKind::Mean: v = s->mean; break;
        case StatKind::Sd:
            if (!s->sd) return "N/A";
            v = *s->sd;
            break;
    }
    if (!percent) return format_count_stat(v);
    return format_one_decimal(v) + (k == StatKind::Sd ? "" : "%");
}

Table build_table(const Report& report) {
    Table t;
    t.header.push_back("Sender PID");
    for (auto c : kCategories) t.header.push_back("Sender " + std::string(column_title(c)) + " Count");
    t.header.push_back("Wearer PID");
    for (auto c : kCategories) {
        t.header.push_back("Wearer " + std::string(column_title(c)) + " Count");
        t.header.push_back("Wearer " + std::string(column_title(c)) + " Rate");
    }

    for (const auto& p : report.pairs) {
        std::vector<std::string> row{p.sender_id};
        for (auto c : kCategories) row.push_back(std::to_string(p.at(c).sent));
        row.push_back(p.recipient_id);
        for (auto c : kCategories) {
            row.push_back(std::to_string(p.at(c).delivered));
            row.push_back(format_rate(p.at(c).rate()));
        }
        t.rows.push_back(std::move(row));
    }

    if (report.pairs.empty()) return t;
    const std::array<std::pair<StatKind, const char*>, 3> kinds{
        {{StatKind::Median, "Median"}, {StatKind::Mean, "Mean"}, {StatKind::Sd, "SD"}}};
    for (const auto& [kind, label] : kinds) {
        std::vector<std::string> row{label};
        for (std::size_t c = 0; c < kCategories.size(); ++c) row.push_back(stat_cell(report.summary.sent[c], kind, false));
        row.push_back(label);
        for (std::size_t c = 0; c < kCategories.size(); ++c) {
            row.push_back(stat_cell(report.summary.delivered[c], kind, false));
            row.push_back(stat_cell(report.summary.rate[c], kind, true));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string render_csv(const Report& report) {
    const auto t = build_table(report);
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(row[i]);
        }
        out += '\n';
    };
    emit(t.header);
    for (const auto& r : t.rows) emit(r);
    return out;
}

std::string render_text(const Report& report) {
    if (report.pairs.empty()) return "No messages.\n";

    // Two stacked blocks: sender counts, then
    // wearer counts and rates.
    const auto t = build_table(report);
    const std::size_t split = 1 + kCategories.size();
    std::string out;
    auto block = [&](std::size_t from, std::size_t to) {
        std::vector<std::size_t> width(to - from, 0);
        auto measure = [&](const std::vector<std::string>& row) {
            for (std::size_t i = from; i < to; ++i) width[i - from] = std::max(width[i - from], row[i].size());
        };
        std::vector<std::string> header(t.header.begin(), t.header.end());
        for (std::size_t i = from; i < to; ++i) {
            // Drop the "Sender "/"Wearer " prefix in the text layout.
            auto pos = header[i].find(' ');
            if (pos != std::string::npos) header[i] = header[i].substr(pos + 1);
        }
        measure(header);
        for (const auto& r : t.rows) measure(r);
        auto line = [&](const std::vector<std::string>& row) {
            for (std::size_t i = from; i < to; ++i) {
                out += i == from ? "" : "  ";
                const auto& cell = row[i];
                if (i == from) {
                    out += cell + std::string(width[0] - cell.size(), ' ');
                } else {
                    out += std::string(width[i - from] - cell.size(), ' ') + cell;
                }
            }
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out += '\n';
        };
        line(header);
        std::size_t rule = 0;
        for (auto w : width) rule += w + 2;
        out += std::string(rule - 2, '-') + '\n';
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (r == report.pairs.size()) out += std::string(rule - 2, '-') + '\n';
            line(t.rows[r]);
        }
    };
    out += "Messages scheduled by senders\n";
    block(0, split);
    out += "\nMessages received by wearers\n";
    block(split, t.header.size());
    return out;
}

}  // namespace wandrelay::analytics
