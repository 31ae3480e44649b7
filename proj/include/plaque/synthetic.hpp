#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "plaque/fd.hpp"
#include "plaque/relation.hpp"

namespace plaque {

struct SyntheticDataset {
  Instance instance;
  FdSet fds;
  std::string fd_text;
};

// Eight-column table shaped like a natural-satellite catalogue: a name key, a
// handful of low-cardinality columns, and a Planet column determined by
// MeanRadius. The first rows share radius and discoverer so that plaque shows
// up from three rows on.
inline SyntheticDataset satellite_like(std::size_t rows, std::uint64_t seed = 7) {
  static constexpr std::array<const char*, 4> planets{"Jupiter", "Saturn", "Uranus", "Neptune"};
  static constexpr std::array<const char*, 5> discoverers{"Galilei", "Cassini", "Herschel", "Kuiper", "Sheppard"};
  static constexpr std::array<const char*, 5> notes{"", "retrograde", "irregular", "co-orbital", "shepherd"};
  constexpr std::size_t radius_values = 12;

  std::mt19937_64 rng(seed);
  std::ostringstream csv;
  csv << "Name,Designation,MeanRadius,Orbit,Discovered,DiscoveredBy,Notes,Planet\n";
  for (std::size_t i = 0; i < rows; ++i) {
    std::size_t radius = i < 3 ? 0 : static_cast<std::size_t>(rng() % radius_values);
    std::size_t by = i < 3 ? 4 : static_cast<std::size_t>(rng() % discoverers.size());
    std::size_t year = 1610 + static_cast<std::size_t>(rng() % 400);
    double orbit = 1000.0 + static_cast<double>(rng() % 10'000'000) / 10.0;
    csv << "S" << (i + 1) << ",S/" << (2000 + i) << ',' << (radius + 3) << ".0," << orbit << ',' << year << ','
        << discoverers[by] << ',' << notes[by] << ',' << planets[radius % planets.size()] << '\n';
  }
  SyntheticDataset out;
  out.instance = ingest_csv(csv.str());
  out.fd_text =
      "Designation -> Name\n"
      "MeanRadius -> Planet\n"
      "MeanRadius, DiscoveredBy -> Planet\n"
      "DiscoveredBy -> Notes\n";
  out.fds = parse_fds(out.fd_text, out.instance.schema());
  return out;
}

}  // namespace plaque
