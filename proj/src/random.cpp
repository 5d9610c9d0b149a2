#include "isar/random.hpp"

#include <bit>
#include <cmath>

#include "isar/vec3.hpp"

namespace isar {

std::uint64_t double_bits(double v) {
    if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
    return std::bit_cast<std::uint64_t>(v);
}

std::pair<double, double> NormalStream::next_pair() {
    const double u1 = 1.0 - unit_interval(engine_());  // (0, 1]
    const double u2 = unit_interval(engine_());
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace isar
