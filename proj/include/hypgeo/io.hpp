#pragma once

// File formats and persistence: measure files ("word weight" per line, weights
// as p/q or decimals), CSV output, and a cache of binary tables keyed by
// (module, config hash) with a JSON manifest.

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypgeo/measure.hpp"

namespace hypgeo {

using Json = nlohmann::ordered_json;

// --- measure files ------------------------------------------------------------------

inline FiniteMeasure parse_measure(std::istream& in, int rank) {
  std::vector<std::pair<Word, Rational>> exact;
  std::vector<std::pair<Word, double>> approx;
  bool all_exact = true;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string w, p, extra;
    if (!(ls >> w)) continue;
    if (!(ls >> p) || (ls >> extra))
      throw InvalidArgument("measure line " + std::to_string(lineno) + ": expected 'word weight'");
    const Word word = parse_word(w, rank);
    try {
      if (p.find_first_of(".eE") == std::string::npos) {
        const Rational q(p);
        exact.emplace_back(word, q);
        approx.emplace_back(word, to_double(q));
      } else {
        all_exact = false;
        approx.emplace_back(word, std::stod(p));
      }
    } catch (const std::exception&) {
      throw InvalidArgument("measure line " + std::to_string(lineno) + ": bad weight '" + p + "'");
    }
  }
  if (approx.empty()) throw InvalidArgument("measure file has no atoms");
  if (all_exact) return FiniteMeasure::from_rational(rank, std::move(exact));
  return FiniteMeasure::from_double(rank, std::move(approx), 1e-9);
}

inline FiniteMeasure load_measure(const std::string& path, int rank) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open measure file " + path);
  return parse_measure(in, rank);
}

// --- CSV -------------------------------------------------------------------------------

inline std::string csv_field(const Json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

/// Rows given as arrays of JSON scalars.
inline void write_csv(std::ostream& out, const std::vector<std::string>& header, const Json& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << csv_field(r[i]);
    out << '\n';
  }
}

// --- cache ------------------------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Binary tables: "HYPGTBL\0", u32 version, u64 count, count doubles (host
/// byte order). The manifest maps each key to module, config and file name.
class Cache {
 public:
  static constexpr std::uint32_t kVersion = 1;

  explicit Cache(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    const auto m = dir_ / "manifest.json";
    if (std::filesystem::exists(m)) {
      std::ifstream in(m);
      try {
        manifest_ = Json::parse(in);
      } catch (const std::exception&) {
        manifest_ = Json::object();
      }
    }
    if (!manifest_.is_object() || manifest_.value("version", 0u) != kVersion)
      manifest_ = Json{{"version", kVersion}, {"entries", Json::object()}};
  }

  bool enabled() const { return !dir_.empty(); }

  static std::string key(const std::string& module, const Json& config) {
    std::ostringstream os;
    os << module << '-' << std::hex << std::setw(16) << std::setfill('0') << fnv1a(module + config.dump());
    return os.str();
  }

  std::optional<std::vector<double>> load(const std::string& module, const Json& config) const {
    if (!enabled()) return std::nullopt;
    const std::string k = key(module, config);
    if (!manifest_["entries"].contains(k)) return std::nullopt;
    const auto& e = manifest_["entries"][k];
    if (e.value("config", Json()) != config) return std::nullopt;
    std::ifstream in(dir_ / e.value("file", std::string()), std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    std::uint32_t version = 0;
    std::uint64_t count = 0;
    in.read(magic, 8);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&count), sizeof count);
    if (!in || std::memcmp(magic, "HYPGTBL", 8) != 0 || version != kVersion) return std::nullopt;
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) return std::nullopt;
    return v;
  }

  void store(const std::string& module, const Json& config, const std::vector<double>& v) {
    if (!enabled()) return;
    const std::string k = key(module, config);
    const std::string file = k + ".bin";
    {
      std::ofstream out(dir_ / file, std::ios::binary);
      const std::uint64_t count = v.size();
      out.write("HYPGTBL", 8);
      out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
      out.write(reinterpret_cast<const char*>(&count), sizeof count);
      out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
      if (!out) throw Error("cannot write cache file " + (dir_ / file).string());
    }
    manifest_["entries"][k] = Json{{"module", module}, {"config", config}, {"file", file}, {"count", v.size()}};
    std::ofstream m(dir_ / "manifest.json");
    m << manifest_.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  Json manifest_ = Json{{"version", kVersion}, {"entries", Json::object()}};
};

}  // namespace hypgeo
