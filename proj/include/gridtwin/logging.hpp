#pragma once

namespace gridtwin {

/// Log verbosity from GRIDTWIN_LOG (trace, debug, info, warn, error, off);
/// warnings only when unset. Logs go to stderr.
void setup_logging();

}  // namespace gridtwin
