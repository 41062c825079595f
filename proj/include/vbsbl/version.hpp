#pragma once

#include <string_view>

namespace vbsbl {

std::string_view version() noexcept;

}  // namespace vbsbl
