#include "ciao/clock.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace ciao {

namespace {

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() const override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
};

class FixedClock final : public Clock {
public:
    explicit FixedClock(std::int64_t epoch_seconds) : ms_(epoch_seconds * 1000) {}
    std::int64_t now_ms() const override { return ms_; }

private:
    std::int64_t ms_;
};

} // namespace

std::string Clock::iso8601() const {
    const std::time_t seconds = static_cast<std::time_t>(now_ms() / 1000);
    std::tm utc{};
    gmtime_r(&seconds, &utc);
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02dZ", utc.tm_year + 1900,
                  utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec);
    return buffer;
}

std::shared_ptr<Clock> Clock::system() { return std::make_shared<SystemClock>(); }

std::shared_ptr<Clock> Clock::fixed(std::int64_t epoch_seconds) {
    return std::make_shared<FixedClock>(epoch_seconds);
}

} // namespace ciao
