#include "wandrelay/ids.hpp"

#include <array>

namespace wandrelay {

namespace {
constexpr std::array<char, 32> kCrockford = {'0', '1', '2', '3', '4', '5', '6', '7', '8', '9', 'A',
                                             'B', 'C', 'D', 'E', 'F', 'G', 'H', 'J', 'K', 'M', 'N',
                                             'P', 'Q', 'R', 'S', 'T', 'V', 'W', 'X', 'Y', 'Z'};
}

std::string MessageIdGenerator::next(Timestamp now) {
    const std::int64_t ms = now.time_since_epoch().count();
    if (ms == last_ms_) {
        if (++rand_lo_ == 0) rand_hi_ = (rand_hi_ + 1) & 0xFFFF;
    } else {
        last_ms_ = ms;
        rand_hi_ = rng_() & 0xFFFF;
        rand_lo_ = rng_();
    }

    std::string out(26, '0');
    auto t = static_cast<std::uint64_t>(ms) & ((std::uint64_t{1} << 48) - 1);
    for (int i = 9; i >= 0; --i) {
        out[i] = kCrockford[t & 31];
        t >>= 5;
    }
    // 80 random bits -> 16 chars, most significant first.
    std::uint64_t hi = rand_hi_;
    std::uint64_t lo = rand_lo_;
    for (int i = 25; i >= 10; --i) {
        out[i] = kCrockford[lo & 31];
        lo = (lo >> 5) | ((hi & 31) << 59);
        hi >>= 5;
    }
    return out;
}

bool is_ulid(const std::string& id) noexcept {
    if (id.size() != 26) return false;
    for (char c : id) {
        bool found = false;
        for (char k : kCrockford) found = found || k == c;
        if (!found) return false;
    }
    return true;
}

}  // namespace wandrelay
