#include "liesys/system_io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "liesys/catalog.hpp"

namespace liesys {

namespace {

using nlohmann::json;

Vec read_vector(const json& node, const std::string& what) {
  if (!node.is_array()) throw InputError(what + " must be an array of numbers");
  Vec out(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_number()) throw InputError(what + " must contain only numbers");
    out(static_cast<Eigen::Index>(i)) = node[i].get<double>();
  }
  if (!out.allFinite()) throw InputError(what + " contains non-finite values");
  return out;
}

Mat read_matrix(const json& node, const std::string& what) {
  if (!node.is_array() || node.empty()) throw InputError(what + " must be a non-empty array of rows");
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  Mat out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const Vec row = read_vector(node[r], what + " row");
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(what + " is not rectangular");
    out.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return out;
}

ModelPtr read_group(const json& node) {
  if (node.is_string()) {
    const std::string name = node.get<std::string>();
    if (name == "gl_plus" || name == "abelian") {
      throw InputError("group '" + name + "' needs a size: {\"" + name + "\": n}");
    }
    return model_by_name(name);
  }
  if (node.is_object() && node.size() == 1) {
    const std::string name = node.begin().key();
    const json& size = node.begin().value();
    if ((name == "gl_plus" || name == "abelian") && size.is_number_integer()) {
      return model_by_name(name, size.get<int>());
    }
  }
  throw InputError("group must be a catalog name or {\"gl_plus\": n} / {\"abelian\": n}");
}

json vector_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

SystemDocument parse(const json& doc) {
  if (!doc.is_object()) throw InputError("system document must be a JSON object");
  static const std::set<std::string> known = {"group",   "derivation",  "control_fields", "control_range",
                                              "control", "description", "expected"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw InputError("unknown key '" + item.key() + "'");
  }
  for (const char* key : {"group", "derivation", "control_fields"}) {
    if (!doc.contains(key)) throw InputError(std::string("missing key '") + key + "'");
  }

  const ModelPtr model = read_group(doc["group"]);
  const int dim = model->dim();

  const json& dnode = doc["derivation"];
  if (!dnode.is_object() || dnode.size() != 1 || !(dnode.contains("inner") || dnode.contains("matrix"))) {
    throw InputError("derivation must be {\"inner\": [...]} or {\"matrix\": [[...]]}");
  }
  std::optional<Derivation> derivation;
  if (dnode.contains("inner")) {
    const Vec x = read_vector(dnode["inner"], "derivation.inner");
    if (x.size() != dim) {
      throw InputError("derivation.inner needs " + std::to_string(dim) + " coordinates for " + model->name());
    }
    derivation = derivation_from_inner(model, x);
  } else {
    const Mat d = read_matrix(dnode["matrix"], "derivation.matrix");
    if (d.rows() != dim || d.cols() != dim) {
      throw InputError("derivation.matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    std::optional<Vec> inner;
    if (model->flow_backend() == FlowBackend::inner_conjugation) inner = find_inner_generator(model, d);
    derivation = Derivation(model, d, inner);
  }

  const json& fnode = doc["control_fields"];
  if (!fnode.is_array() || fnode.empty()) throw InputError("control_fields must be a non-empty array");
  std::vector<AlgebraElement> fields;
  for (const json& f : fnode) {
    const Vec y = read_vector(f, "control field");
    if (y.size() != dim) {
      throw InputError("control fields need " + std::to_string(dim) + " coordinates for " + model->name());
    }
    fields.emplace_back(model, y);
  }

  std::optional<ControlRange> range;
  if (doc.contains("control_range")) {
    const json& rnode = doc["control_range"];
    if (!rnode.is_object() || !rnode.contains("min") || !rnode.contains("max") || rnode.size() != 2) {
      throw InputError("control_range must be {\"min\": [...], \"max\": [...]}");
    }
    range = ControlRange{read_vector(rnode["min"], "control_range.min"), read_vector(rnode["max"], "control_range.max")};
  }

  LinearControlSystem system(model, *derivation, std::move(fields), range);

  std::vector<ControlSegment> segments;
  if (doc.contains("control")) {
    const json& cnode = doc["control"];
    if (!cnode.is_array()) throw InputError("control must be an array of segments");
    for (const json& seg : cnode) {
      if (!seg.is_object() || !seg.contains("duration") || !seg.contains("u") || seg.size() != 2) {
        throw InputError("control segments must be {\"duration\": t, \"u\": [...]}");
      }
      if (!seg["duration"].is_number()) throw InputError("segment duration must be a number");
      segments.push_back({seg["duration"].get<double>(), read_vector(seg["u"], "segment u")});
    }
  }
  PiecewiseControl control(std::move(segments));
  control.check_against(system);

  std::string description;
  if (doc.contains("description")) {
    if (!doc["description"].is_string()) throw InputError("description must be a string");
    description = doc["description"].get<std::string>();
  }
  json expected = doc.contains("expected") ? doc["expected"] : json();
  return SystemDocument{std::move(system), std::move(control), std::move(description), std::move(expected)};
}

}  // namespace

SystemDocument load_system(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse(doc);
  } catch (const json::exception& e) {
    throw InputError(std::string("schema violation: ") + e.what());
  }
}

SystemDocument load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open system file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_system(text.str());
}

std::string emit_system(const LinearControlSystem& system, const PiecewiseControl& control) {
  const ModelPtr& model = system.model();
  json doc;
  switch (model->kind()) {
    case GroupKind::gl_plus: doc["group"] = {{"gl_plus", model->ambient_size()}}; break;
    case GroupKind::abelian: doc["group"] = {{"abelian", model->dim()}}; break;
    default: doc["group"] = model->name(); break;
  }
  const Derivation& d = system.derivation();
  if (d.is_inner()) {
    doc["derivation"] = {{"inner", vector_json(*d.inner_generator())}};
  } else {
    json rows = json::array();
    for (Eigen::Index r = 0; r < d.matrix().rows(); ++r) rows.push_back(vector_json(d.matrix().row(r).transpose()));
    doc["derivation"] = {{"matrix", rows}};
  }
  json fields = json::array();
  for (const AlgebraElement& y : system.control_fields()) fields.push_back(vector_json(y.coords()));
  doc["control_fields"] = fields;
  if (const auto& range = system.control_range()) {
    doc["control_range"] = {{"min", vector_json(range->min)}, {"max", vector_json(range->max)}};
  }
  json segments = json::array();
  for (const ControlSegment& seg : control.segments()) {
    segments.push_back({{"duration", seg.duration}, {"u", vector_json(seg.u)}});
  }
  doc["control"] = segments;
  return doc.dump(2);
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  if (trajectory.points.empty()) return;
  const ModelPtr& model = trajectory.points.front().model();
  const int n = model->ambient_size();
  const bool complex = model->complex_realization();
  out << "t";
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::string name = "m_" + std::to_string(r) + std::to_string(c);
      if (complex) {
        out << "," << name << "_re," << name << "_im";
      } else {
        out << "," << name;
      }
    }
  }
  out << "\n";
  for (std::size_t i = 0; i < trajectory.points.size(); ++i) {
    out << format_number(trajectory.times[i]);
    const CMat& g = trajectory.points[i].matrix();
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        out << "," << format_number(g(r, c).real());
        if (complex) out << "," << format_number(g(r, c).imag());
      }
    }
    out << "\n";
  }
}

}  // namespace liesys
