#pragma once

#include <cstdint>
#include <vector>

#include "tylr/relations.hpp"

namespace tylr {

struct BenchRow {
  int size = 0;
  double parse_ms = 0;
  double edit_ms = 0;  // mean over the local edits
};

struct BenchResult {
  std::vector<BenchRow> rows;
  double exponent = 0;  // least-squares slope of log time over log size
};

// Batch-molds generated programs of the given sizes, then times local edits
// (one token deleted and the buffer remolded).
BenchResult bench_parse(const Relations& r, const std::vector<int>& sizes, int edits,
                        std::uint64_t seed);

double fit_exponent(const std::vector<double>& sizes, const std::vector<double>& times);

}  // namespace tylr
