#pragma once

#include "msr/forward.hpp"

#include <string>

namespace msr {

// .dtn: one JSON header line (grid, trace stencil, probe metadata, block sizes) followed by
// the final state and then the trace, as interleaved re/im doubles.
void write_dtn(const std::string& path, const DtnRecord& r);
DtnRecord read_dtn(const std::string& path);

} // namespace msr
