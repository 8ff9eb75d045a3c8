#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlsfloer/diagnostics.hpp"
#include "nlsfloer/dynamics.hpp"
#include "nlsfloer/floer.hpp"
#include "nlsfloer/model.hpp"
#include "nlsfloer/smalldiv.hpp"
#include "nlsfloer/spectral.hpp"

namespace nlsfloer {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document; what() starts with the offending field path.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

json field_to_json(const SpectralField& u);
SpectralField field_from_json(const json& j, const std::string& path = "field");

json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j, const std::string& path = "model");

json continuation_to_json(const ContinuationResult& r);
ContinuationResult continuation_from_json(const json& j, const std::string& path = "continuation");

json floer_state_to_json(const FloerState& s);
FloerState floer_state_from_json(const json& j, const std::string& path = "floer_state");

// Shortest decimal form that reads back to the same double.
std::string fmt_double(double v);

std::string scan_csv(const ScanReport& r);
std::string convergents_csv(const ConvergentList& c);
std::string decay_csv(const DecayProfile& p);
std::string distance_csv(const DistinctnessReport& r, const std::vector<std::string>& labels);
std::string history_csv(const std::vector<FloerHistoryRow>& h);
std::string gap_csv(const std::vector<GapReport>& rows);
std::string hofer_csv(const HoferReport& r);
std::string slices_csv(const std::vector<SliceRow>& rows);

// Write to a sibling temporary and rename over the target.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
std::string sha256_hex(const std::string& content);

struct ManifestEntry {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string version;
  std::string timestamp;
  std::string pipeline;
  json config;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string status;
  int exit_code = 0;
  std::vector<ManifestEntry> artifacts;
};

json manifest_to_json(const RunManifest& m);

}  // namespace nlsfloer
