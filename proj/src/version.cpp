#include "vbsbl/version.hpp"

namespace vbsbl {

std::string_view version() noexcept { return VBSBL_VERSION; }

}  // namespace vbsbl
