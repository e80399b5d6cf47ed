#include "mwt/io.hpp"

#include <fstream>
#include <sstream>

#include "mwt/error.hpp"
#include "mwt/index.hpp"

namespace mwt {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(key, "missing");
  return *it;
}

int get_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field, "expected an integer");
  return v.get<int>();
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ValidationError(field, "expected a number");
  return v.get<double>();
}

std::vector<double> get_array(const json& v, const std::string& field) {
  if (!v.is_array()) throw ValidationError(field, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::vector<double>> get_arrays(const json& v, const std::string& field) {
  if (!v.is_array()) throw ValidationError(field, "expected an array of arrays");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_array(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

}  // namespace

WeightInput parse_weight_input(const json& j) {
  if (!j.is_object()) throw ValidationError("input", "expected a JSON object");
  WeightInput in;
  in.d = get_int(require(j, "d"), "d");
  if (j.contains("nu")) in.nu = get_int(j["nu"], "nu");
  in.max_level = get_int(require(j, "L_max"), "L_max");
  in.resolution = get_int(require(j, "resolution"), "resolution");
  in.p = get_array(require(j, "p"), "p");
  if (j.contains("p_total")) in.p_total = get_number(j["p_total"], "p_total");
  in.omega = get_array(require(j, "omega"), "omega");
  in.sigma = get_arrays(require(j, "sigma"), "sigma");
  if (j.contains("f")) in.f = get_arrays(j["f"], "f");
  return in;
}

LoadedInput read_weight_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ValidationError("input", "cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << file.rdbuf();
  LoadedInput out;
  out.bytes = buf.str();
  json j;
  try {
    j = json::parse(out.bytes);
  } catch (const json::parse_error& e) {
    throw ValidationError("input", std::string("malformed JSON: ") + e.what());
  }
  out.input = parse_weight_input(j);
  return out;
}

json weight_input_json(const WeightInput& in) {
  json j{{"d", in.d},
         {"L_max", in.max_level},
         {"resolution", in.resolution},
         {"p", in.p},
         {"omega", in.omega},
         {"sigma", in.sigma}};
  if (in.nu) j["nu"] = *in.nu;
  if (in.p_total) j["p_total"] = *in.p_total;
  if (!in.f.empty()) j["f"] = in.f;
  return j;
}

WeightInput to_input(const WeightSystem& ws, const std::vector<std::vector<double>>& f) {
  WeightInput in;
  in.d = ws.grid.d;
  in.nu = ws.grid.nu;
  in.max_level = ws.grid.max_level;
  in.resolution = ws.grid.resolution();
  in.p = ws.exponents.components();
  in.omega.assign(ws.omega.density().begin(), ws.omega.density().end());
  for (const auto& s : ws.sigmas) in.sigma.emplace_back(s.density().begin(), s.density().end());
  in.f = f;
  return in;
}

std::string cell_csv(const GridConfig& g, const std::vector<std::string>& names,
                     const std::vector<std::span<const double>>& columns) {
  std::ostringstream out;
  out << "cell";
  for (int a = 0; a < g.d; ++a) out << ",x" << a;
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  char buf[64];
  std::int64_t cell = 0;
  for_each_point(g.d, g.resolution(), [&](std::span<const int> p) {
    out << cell;
    for (int a = 0; a < g.d; ++a) out << ',' << p[a];
    for (const auto& c : columns) {
      std::snprintf(buf, sizeof buf, "%.17g", c[static_cast<std::size_t>(cell)]);
      out << ',' << buf;
    }
    out << '\n';
    ++cell;
  });
  return out.str();
}

std::string weights_csv(const WeightSystem& ws) {
  std::vector<std::string> names{"omega"};
  std::vector<std::span<const double>> cols{ws.omega.density()};
  for (std::size_t i = 0; i < ws.m(); ++i) {
    names.push_back("sigma" + std::to_string(i));
    cols.push_back(ws.sigmas[i].density());
  }
  return cell_csv(ws.grid, names, cols);
}

}  // namespace mwt
