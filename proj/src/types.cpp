#include "slashsim/types.hpp"

#include <cmath>

namespace slashsim {

std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    auto x = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    // The floating-point seed can be off by a couple of units near 2^53+.
    while (x > 0 && x > n / x) --x;
    while (x + 1 <= n / (x + 1)) ++x;
    return x;
}

Gwei mul_div_floor(Gwei a, Gwei b, Gwei den) {
    if (den == 0) throw DomainError("mul_div_floor: zero denominator");
    const auto wide = static_cast<unsigned __int128>(a) * b;
    const auto q = wide / den;
    if (q > static_cast<unsigned __int128>(UINT64_MAX))
        throw DomainError("mul_div_floor: quotient exceeds 64 bits");
    return static_cast<Gwei>(q);
}

Gwei scale_floor(Gwei value, Ratio r) {
    if (r.den == 0) throw DomainError("scale_floor: zero denominator");
    return mul_div_floor(value, r.num, r.den);
}

std::string format_gwei(Gwei amount) {
    std::string digits = std::to_string(amount);
    std::string out;
    out.reserve(digits.size() + digits.size() / 3);
    const std::size_t head = digits.size() % 3 == 0 ? 3 : digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i + 3 - head) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string format_signed_gwei(SignedGwei amount) {
    if (amount < 0) return "-" + format_gwei(static_cast<Gwei>(-amount));
    return format_gwei(static_cast<Gwei>(amount));
}

std::string format_eth(Gwei amount) {
    std::string whole = std::to_string(amount / kGweiPerEth);
    std::string frac = std::to_string(amount % kGweiPerEth);
    frac.insert(frac.begin(), 9 - frac.size(), '0');
    return whole + "." + frac;
}

}  // namespace slashsim
