#include "tauleap/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tauleap/error.hpp"

namespace tauleap {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ConfigError("model field '" + field + "': " + what);
}

const json& require(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(ctx.empty() ? key : ctx + "." + key, "missing");
  return *it;
}

template <typename T>
std::vector<T> number_list(const json& j, const std::string& field) {
  if (!j.is_array()) field_error(field, "expected a list");
  std::vector<T> out;
  out.reserve(j.size());
  for (std::size_t k = 0; k < j.size(); ++k) {
    const json& v = j[k];
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) field_error(field + "[" + std::to_string(k) + "]", "expected an integer");
    } else {
      if (!v.is_number()) field_error(field + "[" + std::to_string(k) + "]", "expected a number");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) field_error(field, "expected a number");
  return j.get<double>();
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

Model parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("model parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                      e.what());
  }
  if (!doc.is_object()) throw ConfigError("model document must be an object");

  Model m;
  auto& net = m.network;
  if (auto it = doc.find("name"); it != doc.end() && it->is_string()) net.name = it->get<std::string>();
  if (auto it = doc.find("analytic"); it != doc.end() && it->is_string())
    net.analytic = it->get<std::string>();

  const json& species = require(doc, "species", "");
  if (!species.is_array()) field_error("species", "expected a list of names");
  for (std::size_t k = 0; k < species.size(); ++k) {
    if (!species[k].is_string()) field_error("species[" + std::to_string(k) + "]", "expected a string");
    net.species.push_back(species[k].get<std::string>());
  }
  const std::size_t d = net.species.size();
  if (d == 0) field_error("species", "at least one species is required");

  auto sized = [d](auto vec, const std::string& field) {
    if (vec.size() != d)
      field_error(field, "expected " + std::to_string(d) + " entries, got " + std::to_string(vec.size()));
    return vec;
  };
  net.initial_state = sized(number_list<std::int64_t>(require(doc, "initial", ""), "initial"), "initial");
  net.final_time = number(require(doc, "t_final", ""), "t_final");
  if (!(net.final_time > 0.0)) field_error("t_final", "must be positive");
  net.conservation = sized(number_list<double>(require(doc, "n", ""), "n"), "n");
  net.state_bounds = sized(number_list<std::int64_t>(require(doc, "x_max", ""), "x_max"), "x_max");

  const json& reactions = require(doc, "reactions", "");
  if (!reactions.is_array()) field_error("reactions", "expected a list");
  for (std::size_t j = 0; j < reactions.size(); ++j) {
    const std::string ctx = "reactions[" + std::to_string(j) + "]";
    const json& rj = reactions[j];
    if (!rj.is_object()) field_error(ctx, "expected an object");
    auto nu = sized(number_list<int>(require(rj, "nu", ctx), ctx + ".nu"), ctx + ".nu");
    Reaction r = Reaction::mass_action(std::move(nu), number(require(rj, "c", ctx), ctx + ".c"));
    if (auto it = rj.find("orders"); it != rj.end()) {
      r.orders = sized(number_list<int>(*it, ctx + ".orders"), ctx + ".orders");
      if (std::any_of(r.orders.begin(), r.orders.end(), [](int o) { return o < 0; }))
        field_error(ctx + ".orders", "orders must be nonnegative");
    }
    net.reactions.push_back(std::move(r));
  }

  if (auto it = doc.find("observable"); it != doc.end()) {
    const json& terms = require(*it, "terms", "observable");
    if (!terms.is_array()) field_error("observable.terms", "expected a list");
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const std::string ctx = "observable.terms[" + std::to_string(k) + "]";
      Observable::Term t;
      t.coeff = number(require(terms[k], "coeff", ctx), ctx + ".coeff");
      t.exponents = sized(number_list<int>(require(terms[k], "exponents", ctx), ctx + ".exponents"),
                          ctx + ".exponents");
      m.observable.terms.push_back(std::move(t));
    }
  } else {
    m.observable = Observable::total(d);
  }
  return m;
}

std::string format_model(const Model& model) {
  const auto& net = model.network;
  json doc;
  if (!net.name.empty()) doc["name"] = net.name;
  if (!net.analytic.empty()) doc["analytic"] = net.analytic;
  doc["species"] = net.species;
  doc["initial"] = net.initial_state;
  doc["t_final"] = net.final_time;
  doc["n"] = net.conservation;
  doc["x_max"] = net.state_bounds;
  json reactions = json::array();
  for (const auto& r : net.reactions) reactions.push_back({{"nu", r.nu}, {"c", r.rate}, {"orders", r.orders}});
  doc["reactions"] = reactions;
  json terms = json::array();
  for (const auto& t : model.observable.terms) terms.push_back({{"coeff", t.coeff}, {"exponents", t.exponents}});
  doc["observable"] = {{"terms", terms}};
  return doc.dump(2) + "\n";
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Model m;
  try {
    m = parse_model(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  const auto report = validate_network(m.network);
  if (!report.ok()) throw ConfigError(path.string() + ": model failed validation, " + report.summary());
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << format_model(model);
}

}  // namespace tauleap
