#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "nestsearch/csp.hpp"

namespace nestsearch {

using ordered_json = nlohmann::ordered_json;

std::string instance_to_json(const CspInstance& instance) {
  ordered_json doc;
  doc["version"] = kInstanceFormatVersion;
  doc["n"] = instance.n;
  doc["k"] = instance.k;
  doc["alpha"] = instance.alpha;
  doc["x"] = instance.x;
  doc["seed"] = instance.seed;
  doc["partition_A"] = instance.partition_A;
  ordered_json constraints = ordered_json::array();
  for (const auto& c : instance.constraints) {
    ordered_json entry;
    entry["vars"] = c.variables;
    entry["forbidden"] = c.pattern();
    constraints.push_back(std::move(entry));
  }
  doc["constraints"] = std::move(constraints);
  return doc.dump(2) + "\n";
}

CspInstance instance_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("instance file is not valid JSON: ") + e.what());
  }
  try {
    const int version = doc.at("version").get<int>();
    if (version != kInstanceFormatVersion) {
      throw std::invalid_argument("unsupported instance format version " + std::to_string(version));
    }
    CspInstance out;
    out.n = doc.at("n").get<int>();
    out.k = doc.at("k").get<int>();
    out.alpha = doc.at("alpha").get<double>();
    out.x = doc.at("x").get<double>();
    out.seed = doc.at("seed").get<std::uint64_t>();
    out.partition_A = doc.at("partition_A").get<std::vector<int>>();
    for (const auto& entry : doc.at("constraints")) {
      out.constraints.push_back(
          Constraint::from_pattern(entry.at("vars").get<std::vector<int>>(), entry.at("forbidden").get<std::string>()));
    }
    out.unconstrained = out.constraints.empty();
    out.validate();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed instance file: ") + e.what());
  }
}

void write_instance(const CspInstance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << instance_to_json(instance);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

CspInstance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open instance file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

}  // namespace nestsearch
