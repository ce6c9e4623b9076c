#include "core/runconfig.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "core/common.hpp"

namespace mribench::cfg {

namespace {

using json = nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_config("cannot open config file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw_config("config key '" + key + "': expected a number, got '" + v +
                 "'");
  }
}

int to_int(const std::string& v, const std::string& key) {
  double d = to_double(v, key);
  auto i = static_cast<long long>(d);
  if (static_cast<double>(i) != d)
    throw_config("config key '" + key + "': expected an integer, got '" + v +
                 "'");
  return static_cast<int>(i);
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw_config("config key '" + key + "': expected true/false, got '" + v +
               "'");
}

std::array<double, 3> to_triple(const std::string& v, const std::string& key) {
  std::array<double, 3> out{};
  std::stringstream ss(v);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) throw_config("config key '" + key + "': expected 3 values");
    out[static_cast<std::size_t>(i++)] = to_double(trim(item), key);
  }
  if (i != 3) throw_config("config key '" + key + "': expected 3 values");
  return out;
}

void apply_key(RunConfig& rc, const std::string& key, const std::string& val) {
  auto& t = rc.train;
  auto& p = rc.preprocess;
  if (key == "train.base_lr") {
    t.base_lr = to_double(val, key);
  } else if (key == "train.lr_step") {
    t.lr_step = to_int(val, key);
  } else if (key == "train.lr_gamma") {
    t.lr_gamma = to_double(val, key);
  } else if (key == "train.patience") {
    t.patience = to_int(val, key);
  } else if (key == "train.batch_size") {
    t.batch_size = to_int(val, key);
  } else if (key == "train.max_epochs") {
    t.max_epochs = to_int(val, key);
  } else if (key == "train.seed") {
    t.seed = static_cast<std::uint64_t>(to_double(val, key));
  } else if (key == "train.optimizer") {
    t.optimizer_id = val;
  } else if (key == "aug.flip_prob") {
    p.flip_prob = to_double(val, key);
  } else if (key == "aug.rotation_degrees") {
    p.rotation_degrees = to_double(val, key);
  } else if (key == "aug.target_size") {
    p.target_size = to_int(val, key);
  } else if (key == "aug.mean") {
    p.mean = to_triple(val, key);
  } else if (key == "aug.std") {
    p.std = to_triple(val, key);
  } else if (key == "model.init") {
    rc.init = val;
  } else if (key == "model.head_activation") {
    rc.head_activation = to_bool(val, key);
  } else if (key == "data.root") {
    rc.data_root = val;
  } else {
    throw_config("unknown config key '" + key + "'");
  }
}

std::string json_scalar_to_string(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer())
    return std::to_string(v.get<long long>());
  if (v.is_number_float()) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v.get<double>();
    return ss.str();
  }
  throw_config("config key '" + key + "': unsupported JSON value type");
}

void apply_json(RunConfig& rc, const json& obj, const std::string& prefix) {
  for (const auto& [k, v] : obj.items()) {
    std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      apply_json(rc, v, key);
    } else if (v.is_array()) {
      if (v.size() != 3)
        throw_config("config key '" + key + "': expected 3 values");
      std::string joined;
      for (const auto& item : v) {
        if (!joined.empty()) joined += ",";
        joined += json_scalar_to_string(item, key);
      }
      apply_key(rc, key, joined);
    } else {
      apply_key(rc, key, json_scalar_to_string(v, key));
    }
  }
}

}  // namespace

void RunConfig::validate() const {
  train.validate();
  preprocess.validate();
  if (init != "pretrained" && init != "random") {
    throw_config("model.init must be 'pretrained' or 'random', got '" + init +
                 "'");
  }
}

RunConfig parse_run_config_text(const std::string& text,
                                const std::string& origin) {
  RunConfig rc;
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw_config("config " + origin + ": JSON parse error: " + e.what());
    }
    apply_json(rc, obj, "");
  } else {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw_config("config " + origin + ": line " +
                     std::to_string(line_no) + ": expected 'key = value'");
      }
      apply_key(rc, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
  }
  rc.validate();
  return rc;
}

RunConfig parse_run_config(const std::filesystem::path& path) {
  return parse_run_config_text(read_file(path), path.string());
}

std::string config_hash_hex(const std::filesystem::path& path) {
  std::string bytes = read_file(path);
  return to_hex(fnv1a64(bytes.data(), bytes.size()));
}

}  // namespace mribench::cfg
