#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slashsim {

/// All economics are exact integer Gwei. 1 ETH = 10^9 Gwei.
using Gwei = std::uint64_t;
using SignedGwei = std::int64_t;
using Epoch = std::uint64_t;
using ValidatorId = std::uint32_t;
using StakerId = std::uint32_t;

inline constexpr Gwei kGweiPerEth = 1'000'000'000ULL;

/// Precondition or state-machine violation (bad transition, missing record, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed configuration; carries the offending field path for diagnostics.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Wire/event-stream contract violation (e.g. decreasing epochs).
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

/// Exact positive rational scale factor (num/den). Multiplication always
/// happens before the single floor division.
struct Ratio {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    bool operator==(const Ratio&) const = default;
};

/// floor(sqrt(n)) on exact integers.
std::uint64_t isqrt_u64(std::uint64_t n);

/// floor(a * b / den) through 128-bit intermediates. den must be nonzero.
Gwei mul_div_floor(Gwei a, Gwei b, Gwei den);

/// floor(value * r.num / r.den).
Gwei scale_floor(Gwei value, Ratio r);

/// a - b clamped at zero.
inline Gwei sat_sub(Gwei a, Gwei b) { return a > b ? a - b : 0; }

/// "1,234,567" — used for CLI summaries.
std::string format_gwei(Gwei amount);
std::string format_signed_gwei(SignedGwei amount);
/// 9-decimal fixed point, e.g. "1.390000000".
std::string format_eth(Gwei amount);

}  // namespace slashsim
