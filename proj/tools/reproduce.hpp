// reproduce.hpp — the checklist behind the `reproduce-paper` subcommand:
// every published value and behavior of the built-in families, run as
// assertions with one pass/fail line each.

#pragma once

#include <cstdint>
#include <string>

namespace upbwit::cli {

/// Runs all checklist items whose id contains `only` (all items when empty).
/// Prints one line per item; returns the number of failures.
int run_reproduce_checklist(const std::string& only, std::uint64_t seed);

}  // namespace upbwit::cli
