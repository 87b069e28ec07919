#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace ciao {

/// Time source for report timestamps and durations. The fixed variant pins
/// every reading to one instant so golden-file tests stay byte-identical.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;

    /// UTC ISO-8601 timestamp of now_ms(), e.g. "2026-01-31T12:00:00Z".
    std::string iso8601() const;

    static std::shared_ptr<Clock> system();
    static std::shared_ptr<Clock> fixed(std::int64_t epoch_seconds);
};

} // namespace ciao
