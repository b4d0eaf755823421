#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace orcast::synth {

/// Counties and their planted yield group (1-based).
const std::map<std::string, int>& planted_groups();

/// Writes a deterministic dataset into `dir`: forecast.csv, weather.csv, yields.csv,
/// prices.csv, calendar.txt and a config.txt pointing at them. Planted structure:
///   - county yields fall into four groups separated by ten times the noise level;
///   - non-Valencia %Error is linear in Collier's January cold days plus event effects;
///   - Valencia %Error is linear in Indian River's May heavy-rain days plus event effects.
/// Same seed, same bytes.
void write_dataset(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace orcast::synth
