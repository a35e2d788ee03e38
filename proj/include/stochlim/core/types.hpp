#pragma once

#include <complex>
#include <numbers>

namespace stochlim {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

}  // namespace stochlim
