#pragma once

/** @file version.hpp */

#include <string_view>

namespace circbias {

inline constexpr std::string_view version = "0.1.0";

} // namespace circbias
