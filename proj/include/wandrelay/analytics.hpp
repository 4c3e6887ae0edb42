#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wandrelay/message.hpp"
#include "wandrelay/run_log.hpp"

namespace wandrelay::analytics {

enum class Category { LocationOnly, TimeOnly, MarkerOnly, CompoundSpecific, CompoundFlexible, Direct };

inline constexpr std::array<Category, 6> kCategories = {
    Category::LocationOnly,     Category::TimeOnly,         Category::MarkerOnly,
    Category::CompoundSpecific, Category::CompoundFlexible, Category::Direct};

std::string_view to_string(Category c) noexcept;  // "location-only", ...
std::string_view column_title(Category c) noexcept;  // "Location", "Time", ...

Category categorize(const ArMessage& message) noexcept;

struct Stats {
    double median = 0.0;
    double mean = 0.0;
    std::optional<double> sd;  // sample (n-1) deviation; absent for n < 2
};

// Throws Error{EmptyInput} for an empty list.
Stats stats(std::span<const double> values);

struct CategoryCounts {
    int sent = 0;
    int delivered = 0;
    // Integer percent, half rounded up; absent when nothing was sent.
    std::optional<int> rate() const noexcept;
};

struct PairSummary {
    std::string sender_id;
    std::string recipient_id;
    std::array<CategoryCounts, 6> by_category{};

    std::string pair_id() const { return sender_id + "/" + recipient_id; }
    const CategoryCounts& at(Category c) const noexcept { return by_category[static_cast<std::size_t>(c)]; }
    CategoryCounts& at(Category c) noexcept { return by_category[static_cast<std::size_t>(c)]; }
};

// Median/mean/SD over pairs for every column of the report. Rate statistics
// skip N/A entries and are computed on the integer rates as printed.
struct SummaryRows {
    std::array<std::optional<Stats>, 6> sent;
    std::array<std::optional<Stats>, 6> delivered;
    std::array<std::optional<Stats>, 6> rate;
};

struct Report {
    std::vector<PairSummary> pairs;
    SummaryRows summary;
};

// Throws Error{IncompleteLog} if an accepted message has no terminal state.
std::vector<PairSummary> summarize_pairs(const RunLog& log);
Report summarize(std::span<const RunLog> logs);
SummaryRows summary_rows(std::span<const PairSummary> pairs);

std::string render_text(const Report& report);
std::string render_csv(const Report& report);

}  // namespace wandrelay::analytics
