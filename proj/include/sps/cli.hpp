#pragma once

// Command-line front end shared by the `sps` executable and the tests.
//
//   sps solve <config> [-o dir]
//   sps sweep <config> --a 0.3,0.5,0.8 [-o dir]
//   sps verify <config> <field.spsf> [--c-a value]
//   sps check-potential <config> [--theta --eta --c-a --C-q --alpha --delta --radii]
//   sps constants [--p 4] [--config file] [--t 0] [--q 6] [--C-q] [--C-hat --delta]
//   sps plot <config> [--field f.spsf] [--sweep sweep.csv] [-o dir]
//
// Exit codes: 0 success, 1 solver non-convergence, 2 configuration or input
// error.

#include <iosfwd>

namespace sps {

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Worker count for sweeps: SPS_THREADS when set to a positive integer,
// otherwise the hardware concurrency (at least 1).
unsigned worker_threads();

}  // namespace sps
