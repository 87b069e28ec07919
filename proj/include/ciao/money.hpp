#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ciao {

/// Exact USD amount stored as integer picodollars (1e-12 USD), so per-token
/// prices and sums never accumulate floating-point drift.
class Usd {
public:
    Usd() = default;
    static Usd from_pico(std::int64_t pico) { return Usd(pico); }

    /// Parses a decimal string like "1.25" or "-0.0004" (up to 12 fraction digits).
    static Usd parse(std::string_view text);

    std::int64_t pico() const { return pico_; }
    double approx() const { return static_cast<double>(pico_) / 1e12; }

    /// Decimal string with a fixed number of fraction digits, rounded half
    /// away from zero. `to_string(4)` of $1.19 yields "1.1900".
    std::string to_string(int fraction_digits = 4) const;

    Usd operator+(Usd other) const { return Usd(pico_ + other.pico_); }
    Usd& operator+=(Usd other) {
        pico_ += other.pico_;
        return *this;
    }
    bool operator==(const Usd&) const = default;
    auto operator<=>(const Usd&) const = default;

private:
    explicit Usd(std::int64_t pico) : pico_(pico) {}
    std::int64_t pico_ = 0;
};

} // namespace ciao
