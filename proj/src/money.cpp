#include "ciao/money.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

namespace ciao {

namespace {

constexpr int kFractionDigitsMax = 12;

std::int64_t pow10(int exp) {
    std::int64_t value = 1;
    for (int i = 0; i < exp; ++i) {
        value *= 10;
    }
    return value;
}

} // namespace

Usd Usd::parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }

    std::int64_t whole = 0;
    bool any_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        whole = whole * 10 + (text[i] - '0');
        any_digit = true;
        ++i;
    }

    std::int64_t fraction = 0;
    int fraction_digits = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (fraction_digits < kFractionDigitsMax) {
                fraction = fraction * 10 + (text[i] - '0');
                ++fraction_digits;
            }
            any_digit = true;
            ++i;
        }
    }

    if (!any_digit || i != text.size()) {
        throw std::invalid_argument("not a decimal USD amount: '" + std::string(text) + "'");
    }

    std::int64_t pico = whole * pow10(kFractionDigitsMax) +
                        fraction * pow10(kFractionDigitsMax - fraction_digits);
    return Usd(negative ? -pico : pico);
}

std::string Usd::to_string(int fraction_digits) const {
    if (fraction_digits < 0 || fraction_digits > kFractionDigitsMax) {
        throw std::invalid_argument("fraction_digits out of range");
    }

    const bool negative = pico_ < 0;
    std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-pico_)
                                       : static_cast<std::uint64_t>(pico_);

    // Round half away from zero at the requested digit.
    const std::uint64_t divisor =
        static_cast<std::uint64_t>(pow10(kFractionDigitsMax - fraction_digits));
    magnitude = (magnitude + divisor / 2) / divisor;

    const std::uint64_t scale = static_cast<std::uint64_t>(pow10(fraction_digits));
    const std::uint64_t whole = magnitude / scale;
    const std::uint64_t fraction = magnitude % scale;

    std::string out = negative ? "-" : "";
    out += std::to_string(whole);
    if (fraction_digits > 0) {
        std::string frac = std::to_string(fraction);
        out += "." + std::string(static_cast<std::size_t>(fraction_digits) - frac.size(), '0') +
               frac;
    }
    return out;
}

} // namespace ciao
