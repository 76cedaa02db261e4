#include "logcap/result_table.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "logcap/errors.hpp"

namespace logcap {

using Json = nlohmann::json;

ResultTable::ResultTable(std::string id_, std::vector<std::string> columns_)
    : id(std::move(id_)), columns(std::move(columns_)) {}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw InvalidArgument("ResultTable " + id + ": row has " + std::to_string(row.size()) +
                          " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

void ResultTable::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

std::string ResultTable::meta(const std::string& key) const {
  for (const auto& kv : metadata) {
    if (kv.first == key) return kv.second;
  }
  throw LookupError("ResultTable " + id + ": no metadata key " + key);
}

std::size_t ResultTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw LookupError("ResultTable " + id + ": no column " + name);
}

bool ResultTable::all_pass() const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != "pass") continue;
    for (const auto& r : rows) {
      if (const bool* b = std::get_if<bool>(&r[c]); b && !*b) return false;
    }
  }
  return true;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  if (text == "plot") return OutputFormat::Plot;
  throw ConfigError("unknown format '" + text + "' (csv, json, plot)");
}

std::string extension(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Plot: return "dat";
  }
  return "out";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c);
}

const char* type_name(const Cell& c) {
  switch (c.index()) {
    case 1: return "bool";
    case 2: return "int";
    case 3: return "real";
    case 4: return "text";
    default: return "empty";
  }
}

Json cell_json(const Cell& c) {
  switch (c.index()) {
    case 1: return std::get<bool>(c);
    case 2: return std::get<long long>(c);
    case 3: {
      const double v = std::get<double>(c);
      if (std::isfinite(v)) return v;
      return format_double(v);
    }
    case 4: return std::get<std::string>(c);
    default: return nullptr;
  }
}

Cell cell_from_json(const Json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) return j.get<double>();
  return j.get<std::string>();
}

}  // namespace

std::string to_csv(const ResultTable& t) {
  std::ostringstream os;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) os << ',';
    os << csv_escape(t.columns[c]);
  }
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) os << ',';
      os << csv_escape(cell_text(r[c]));
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json_text(const ResultTable& t) {
  Json o;
  o["id"] = t.id;
  o["columns"] = t.columns;
  Json types = Json::array();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    std::string ty = "empty";
    for (const auto& r : t.rows) {
      if (r[c].index() != 0) {
        ty = type_name(r[c]);
        break;
      }
    }
    types.push_back(ty);
  }
  o["types"] = types;
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json row = Json::array();
    for (const auto& c : r) row.push_back(cell_json(c));
    rows.push_back(row);
  }
  o["rows"] = rows;
  Json meta = Json::array();
  for (const auto& [k, v] : t.metadata) meta.push_back(Json{{"key", k}, {"value", v}});
  o["metadata"] = meta;
  return o.dump(2) + "\n";
}

ResultTable table_from_json_text(const std::string& text) {
  Json o;
  try {
    o = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("result table JSON: ") + e.what());
  }
  ResultTable t(o.at("id").get<std::string>(), o.at("columns").get<std::vector<std::string>>());
  std::vector<std::string> types;
  if (o.contains("types")) types = o["types"].get<std::vector<std::string>>();
  for (const auto& r : o.at("rows")) {
    std::vector<Cell> row;
    for (std::size_t c = 0; c < r.size(); ++c) {
      Cell cell = cell_from_json(r[c]);
      // Non-finite reals travel as text.
      if (c < types.size() && types[c] == "real" && r[c].is_string()) {
        const std::string s = r[c].get<std::string>();
        cell = s == "nan" ? NAN : (s == "inf" ? INFINITY : -INFINITY);
      } else if (c < types.size() && types[c] == "real" && r[c].is_number_integer()) {
        cell = r[c].get<double>();
      }
      row.push_back(std::move(cell));
    }
    t.add_row(std::move(row));
  }
  for (const auto& kv : o.at("metadata")) {
    t.metadata.emplace_back(kv.at("key").get<std::string>(), kv.at("value").get<std::string>());
  }
  return t;
}

std::string to_plot_data(const ResultTable& t) {
  std::ostringstream os;
  if (t.columns.empty()) return "";
  // x column: metadata "plot_x" when present, else the first column.
  std::size_t x = 0;
  for (const auto& [k, v] : t.metadata) {
    if (k == "plot_x") x = t.column(v);
  }
  auto is_num = [](const Cell& c) { return c.index() == 2 || c.index() == 3; };
  bool first_block = true;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c == x) continue;
    bool numeric = false;
    for (const auto& r : t.rows) {
      if (is_num(r[c])) numeric = true;
    }
    if (!numeric) continue;
    if (!first_block) os << "\n\n";
    first_block = false;
    os << "# " << t.columns[x] << ' ' << t.columns[c] << '\n';
    for (const auto& r : t.rows) {
      if (!is_num(r[x]) || !is_num(r[c])) continue;
      os << cell_text(r[x]) << ' ' << cell_text(r[c]) << '\n';
    }
  }
  return os.str();
}

std::filesystem::path emit(const ResultTable& t, OutputFormat f, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto path = dir / (t.id + "." + extension(f));
  std::string text;
  switch (f) {
    case OutputFormat::Csv: text = to_csv(t); break;
    case OutputFormat::Json: text = to_json_text(t); break;
    case OutputFormat::Plot: text = to_plot_data(t); break;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
  return path;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace logcap
