#pragma once

#include <cstdint>
#include <string>

#include "uwdiff/runconfig.hpp"

namespace uwdiff {

// FNV-1a over the filename; XORed with the run seed so every image gets an
// independent, reproducible chain seed.
std::uint64_t fnv1a64(const std::string& s);

// Executes a batch run: per input image resize, label/estimate, sample,
// save PNG + trace (+ snapshots, + degradation exports), then write
// metrics.csv with an aggregate row. Per-image failures are logged and
// counted, not fatal. Returns 0 when every image succeeded, 1 otherwise;
// configuration-level problems throw instead.
int run(const RunConfig& cfg);

}  // namespace uwdiff
