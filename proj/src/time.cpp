#include "wandrelay/time.hpp"

#include <cctype>
#include <cstdio>

#include "wandrelay/error.hpp"

namespace wandrelay {

namespace {

int read_digits(std::string_view text, std::size_t& pos, std::size_t count) {
    int value = 0;
    for (std::size_t i = 0; i < count; ++i, ++pos) {
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
            throw Error(Errc::ParseError, "bad timestamp '" + std::string(text) + "'");
        }
        value = value * 10 + (text[pos] - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t& pos, char c) {
    if (pos >= text.size() || std::toupper(static_cast<unsigned char>(text[pos])) != c) {
        throw Error(Errc::ParseError, "bad timestamp '" + std::string(text) + "'");
    }
    ++pos;
}

}  // namespace

std::string format_rfc3339(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[40];
    const auto ms = hms.subseconds().count();
    if (ms != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lld.%03lldZ",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                      static_cast<long>(hms.minutes().count()),
                      static_cast<long long>(hms.seconds().count()), static_cast<long long>(ms));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()), static_cast<long>(hms.hours().count()),
                      static_cast<long>(hms.minutes().count()),
                      static_cast<long long>(hms.seconds().count()));
    }
    return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    std::size_t pos = 0;
    const int y = read_digits(text, pos, 4);
    expect(text, pos, '-');
    const int mo = read_digits(text, pos, 2);
    expect(text, pos, '-');
    const int d = read_digits(text, pos, 2);
    expect(text, pos, 'T');
    const int h = read_digits(text, pos, 2);
    expect(text, pos, ':');
    const int mi = read_digits(text, pos, 2);
    expect(text, pos, ':');
    const int s = read_digits(text, pos, 2);

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
        throw Error(Errc::ParseError, "timestamp out of range '" + std::string(text) + "'");
    }

    long long frac_ms = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (digits < 3) frac_ms = frac_ms * 10 + (text[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0) throw Error(Errc::ParseError, "empty fraction in '" + std::string(text) + "'");
        for (int i = digits; i < 3; ++i) frac_ms *= 10;
    }

    minutes offset{0};
    if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
        ++pos;
    } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        const int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        const int oh = read_digits(text, pos, 2);
        expect(text, pos, ':');
        const int om = read_digits(text, pos, 2);
        offset = minutes{sign * (oh * 60 + om)};
    } else {
        throw Error(Errc::ParseError, "missing zone in '" + std::string(text) + "'");
    }
    if (pos != text.size()) {
        throw Error(Errc::ParseError, "trailing characters in '" + std::string(text) + "'");
    }

    return Timestamp{sys_days{ymd}.time_since_epoch() + hours{h} + minutes{mi} + seconds{s} +
                     Millis{frac_ms}} - offset;
}

}  // namespace wandrelay
