#include "tylr/bench.hpp"

#include <chrono>
#include <cmath>

#include "tylr/gen.hpp"
#include "tylr/molder.hpp"

namespace tylr {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double fit_exponent(const std::vector<double>& sizes, const std::vector<double>& times) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < sizes.size(); ++i)
    if (sizes[i] > 0 && times[i] > 0) {
      xs.push_back(std::log(sizes[i]));
      ys.push_back(std::log(times[i]));
    }
  if (xs.size() < 2) return 0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

BenchResult bench_parse(const Relations& r, const std::vector<int>& sizes, int edits,
                        std::uint64_t seed) {
  Generator gen(r, seed);
  Molder m(r);
  {
    // Warm the walk memo so the first row is not an outlier.
    std::vector<InputToken> warm;
    for (const auto& t : gen.sized(200).tokens) warm.push_back({t.text});
    m.run(warm);
  }
  BenchResult out;
  std::vector<double> xs, ys;
  for (int n : sizes) {
    std::vector<InputToken> toks;
    if (n > 0)
      for (const auto& t : gen.sized(n).tokens) toks.push_back({t.text});
    auto t0 = std::chrono::steady_clock::now();
    m.run(toks);
    BenchRow row;
    row.parse_ms = ms_since(t0);

    if (!toks.empty() && edits > 0) {
      auto t1 = std::chrono::steady_clock::now();
      for (int i = 0; i < edits; ++i) {
        size_t at = std::uniform_int_distribution<size_t>(0, toks.size() - 1)(gen.rng());
        InputToken gone = toks[at];
        toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(at));
        m.run(toks);
        toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(at), gone);
      }
      row.edit_ms = ms_since(t1) / edits;
    }
    row.size = static_cast<int>(toks.size());
    out.rows.push_back(row);
    if (n > 0) {
      xs.push_back(row.size);
      ys.push_back(row.parse_ms);
    }
  }
  out.exponent = fit_exponent(xs, ys);
  return out;
}

}  // namespace tylr
