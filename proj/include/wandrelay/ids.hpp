#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "wandrelay/time.hpp"

namespace wandrelay {

// ULID-style identifiers: 10 Crockford base32 chars of millisecond time
// followed by 16 chars of seeded randomness. Within one millisecond the
// random part is incremented, so ids sort in generation order.
class MessageIdGenerator {
public:
    explicit MessageIdGenerator(std::uint64_t seed) : rng_(seed) {}

    std::string next(Timestamp now);

private:
    std::mt19937_64 rng_;
    std::int64_t last_ms_ = -1;
    std::uint64_t rand_hi_ = 0;  // top 16 of the 80 random bits
    std::uint64_t rand_lo_ = 0;  // low 64
};

bool is_ulid(const std::string& id) noexcept;

}  // namespace wandrelay
