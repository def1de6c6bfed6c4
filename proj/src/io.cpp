#include "starpulse/io.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "starpulse/errors.hpp"

namespace starpulse::io {

namespace fs = std::filesystem;

std::string exact(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string brief(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParams("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InvalidParams("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidParams("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json to_json(const ExperimentReport& rep) {
  json j;
  j["name"] = rep.name;
  j["inputs"] = json::object();
  for (const auto& [k, v] : rep.inputs) j["inputs"][k] = v;
  j["rows"] = json::array();
  for (const auto& r : rep.rows) {
    j["rows"].push_back(
        {{"metric", r.metric}, {"value", r.value}, {"expected", r.expected}, {"basis", r.basis}, {"pass", r.pass}});
  }
  j["notes"] = rep.notes;
  j["inconclusive"] = rep.inconclusive;
  j["pass"] = rep.passed();
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace

std::string to_csv(const ExperimentReport& rep) {
  std::ostringstream s;
  s << "metric,value,expected,basis,pass\n";
  for (const auto& r : rep.rows) {
    s << csv_field(r.metric) << ',' << exact(r.value) << ',' << csv_field(r.expected) << ',' << r.basis << ','
      << (r.pass ? "true" : "false") << '\n';
  }
  return s.str();
}

std::vector<fs::path> write_report(const ExperimentReport& rep, const fs::path& dir) {
  const fs::path j = dir / (rep.name + ".json"), c = dir / (rep.name + ".csv");
  write_atomic(j, to_json(rep).dump(2) + "\n");
  write_atomic(c, to_csv(rep));
  return {j, c};
}

json modes_to_json(const GasParams& params, int basis_size, const std::vector<EigenMode>& modes,
                   const Eigen::VectorXd& x) {
  json j;
  j["gamma"] = params.gamma;
  j["rho_c"] = params.rho_c;
  j["basis_size"] = basis_size;
  j["x"] = std::vector<double>(x.data(), x.data() + x.size());
  j["modes"] = json::array();
  for (const auto& m : modes) {
    const auto space = WeightedSpace::make(params, static_cast<int>(m.coeffs.size()), 1);
    const Eigen::VectorXd phi = evaluate_mode(space, m.coeffs, x);
    j["modes"].push_back({{"n", m.index},
                          {"lambda", m.lambda},
                          {"lambda_phys", m.lambda_phys},
                          {"phi_surface", m.phi_surface},
                          {"sign_changes", m.sign_changes},
                          {"coeffs", std::vector<double>(m.coeffs.data(), m.coeffs.data() + m.coeffs.size())},
                          {"phi", std::vector<double>(phi.data(), phi.data() + phi.size())}});
  }
  return j;
}

std::string modes_csv(const json& table) {
  std::ostringstream s;
  s << "n,lambda,lambda_phys";
  for (const double x : table.at("x")) s << ",phi(" << exact(x) << ")";
  s << '\n';
  for (const auto& m : table.at("modes")) {
    s << m.at("n").get<int>() << ',' << exact(m.at("lambda").get<double>()) << ','
      << exact(m.at("lambda_phys").get<double>());
    for (const double p : m.at("phi")) s << ',' << exact(p);
    s << '\n';
  }
  return s.str();
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream s;
  s << "t,R_F,y_center,y_surface,energy\n";
  for (const auto& d : traj.diagnostics) {
    s << exact(d.t) << ',' << exact(d.radius) << ',' << exact(d.y_center) << ',' << exact(d.y_surface) << ','
      << exact(d.energy) << '\n';
  }
  return s.str();
}

json snapshots_to_json(const Trajectory& traj, const Eigen::VectorXd& x) {
  json j;
  j["x"] = std::vector<double>(x.data(), x.data() + x.size());
  j["snapshots"] = json::array();
  for (const auto& s : traj.snapshots) {
    j["snapshots"].push_back({{"t", s.t},
                              {"coeffs", std::vector<double>(s.coeffs.data(), s.coeffs.data() + s.coeffs.size())},
                              {"velocity", std::vector<double>(s.velocity.data(), s.velocity.data() + s.velocity.size())}});
  }
  return j;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> read_samples(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<double> xs, vs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x)) continue;
    if (!(ls >> v)) throw InvalidParams(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    xs.push_back(x);
    vs.push_back(v);
  }
  return {Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
          Eigen::Map<Eigen::VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()))};
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path ResultCache::default_dir() {
  if (const char* env = std::getenv("STARPULSE_CACHE"); env && *env) return env;
  return ".starpulse-cache";
}

ResultCache::ResultCache(fs::path dir, std::string schema) : dir_(std::move(dir)), schema_(std::move(schema)) {}

std::string ResultCache::key(const json& params) const {
  return fnv1a_hex(json{{"schema", schema_}, {"params", params}}.dump());
}

fs::path ResultCache::path_for(const std::string& key) const { return dir_ / (key + ".json"); }

std::optional<json> ResultCache::load(const std::string& key) const {
  const auto path = path_for(key);
  if (!fs::exists(path)) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw CacheCorrupt(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != schema_ || j.value("key", "") != key || !j.contains("payload")) {
    throw CacheCorrupt(path.string() + ": schema or key mismatch");
  }
  return j.at("payload");
}

void ResultCache::store(const std::string& key, const json& payload) const {
  write_atomic(path_for(key), json{{"schema", schema_}, {"key", key}, {"payload", payload}}.dump() + "\n");
}

ResultCache::Lookup ResultCache::get_or_produce(const json& params, const std::function<json()>& producer) const {
  const std::string k = key(params);
  Lookup out;
  try {
    if (auto cached = load(k)) {
      out.payload = std::move(*cached);
      out.hit = true;
      return out;
    }
  } catch (const CacheCorrupt& e) {
    out.warning = std::string("cache entry ignored (") + e.what() + "), recomputing";
  }
  out.payload = producer();
  store(k, out.payload);
  return out;
}

}  // namespace starpulse::io
