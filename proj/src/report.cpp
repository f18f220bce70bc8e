#include "soliton_forge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sforge {

namespace {

std::string fmt(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";  // no "-0": it would not survive a parse/write cycle
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_short(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

void write_value(const Json& j, std::string& out, int depth);

void newline(std::string& out, int depth) {
  out += '\n';
  out.append(static_cast<std::size_t>(2 * depth), ' ');
}

bool scalar(const Json& j) { return !j.is_object() && !j.is_array(); }

void write_value(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      break;
    case Json::value_t::number_float:
      out += fmt(j.get<double>());
      break;
    case Json::value_t::string:
      out += Json(j.get<std::string>()).dump();
      break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      if (std::all_of(j.begin(), j.end(), scalar)) {
        out += '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_value(j[i], out, depth);
        }
        out += ']';
        break;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(out, depth + 1);
        write_value(j[i], out, depth + 1);
      }
      newline(out, depth);
      out += ']';
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(out, depth + 1);
        out += Json(key).dump();
        out += ": ";
        write_value(v, out, depth + 1);
      }
      newline(out, depth);
      out += '}';
      break;
    }
    default:
      out += "null";
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string joined(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string point_text(const std::vector<double>& p, const char* sep) {
  std::vector<std::string> parts;
  for (double x : p) parts.push_back(fmt(x));
  return joined(parts, sep);
}

std::string emit_csv(const SuiteReport& r) {
  std::string out = "check,point_index,point,residual,tolerance,pass,notes\n";
  for (const auto& rec : r.records) {
    out += rec.check + "," + std::to_string(rec.point_index) + "," + point_text(rec.point, ";") + "," +
           fmt(rec.residual) + "," + fmt(rec.tolerance) + "," + (rec.pass ? "true" : "false") + "," +
           csv_field(joined(rec.notes, "; ")) + "\n";
  }
  return out;
}

std::string pad(const std::string& s, std::size_t w, bool right = false) {
  if (s.size() >= w) return s;
  const std::string fill(w - s.size(), ' ');
  return right ? fill + s : s + fill;
}

std::string emit_text(const SuiteReport& r) {
  const std::vector<std::string> head{"check", "points", "passed", "failed", "worst residual", "tolerance", "status"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.summary)
    rows.push_back({s.check, std::to_string(s.count), std::to_string(s.passed), std::to_string(s.failed),
                    fmt_short(s.worst_residual), fmt_short(s.tolerance), s.failed == 0 ? "PASS" : "FAIL"});
  std::vector<std::size_t> w(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    w[c] = head[c].size();
    for (const auto& row : rows) w[c] = std::max(w[c], row[c].size());
  }
  std::string out = "soliton_forge " + r.engine_version + "\n\n";
  const auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) l += "  ";
      l += pad(cells[c], w[c], c >= 1 && c <= 5);
    }
    while (!l.empty() && l.back() == ' ') l.pop_back();
    out += l + "\n";
  };
  line(head);
  std::vector<std::string> rule;
  for (auto x : w) rule.push_back(std::string(x, '-'));
  line(rule);
  for (const auto& row : rows) line(row);
  out += "\n";
  int failed = 0;
  for (const auto& s : r.summary) failed += s.failed;
  out += r.all_pass() ? "all checks passed\n" : std::to_string(failed) + " failing record(s)\n";
  return out;
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "text") return ReportFormat::text;
  throw ConfigError("output.format", "must be json, csv or text");
}

Json report_document(const SuiteReport& r) {
  Json doc = Json::object();
  doc["engine_version"] = r.engine_version;
  doc["provenance"] = r.config_json.empty() ? Json::object() : Json::parse(r.config_json);
  doc["pass"] = r.all_pass();
  Json summary = Json::array();
  for (const auto& s : r.summary) {
    Json j = Json::object();
    j["check"] = s.check;
    j["count"] = s.count;
    j["passed"] = s.passed;
    j["failed"] = s.failed;
    j["worst_residual"] = number(s.worst_residual);
    j["tolerance"] = number(s.tolerance);
    j["pass"] = s.failed == 0;
    summary.push_back(std::move(j));
  }
  doc["summary"] = std::move(summary);
  Json records = Json::array();
  for (const auto& rec : r.records) {
    Json j = Json::object();
    j["check"] = rec.check;
    j["point_index"] = rec.point_index;
    Json p = Json::array();
    for (double x : rec.point) p.push_back(number(x));
    j["point"] = std::move(p);
    j["residual"] = number(rec.residual);
    j["tolerance"] = number(rec.tolerance);
    j["pass"] = rec.pass;
    Json values = Json::array();
    for (const auto& [name, v] : rec.values) values.push_back(Json::array({name, number(v)}));
    j["values"] = std::move(values);
    j["notes"] = rec.notes;
    records.push_back(std::move(j));
  }
  doc["records"] = std::move(records);
  return doc;
}

std::string write_json(const Json& doc) {
  std::string out;
  write_value(doc, out, 0);
  out += '\n';
  return out;
}

std::string emit_report(const SuiteReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return write_json(report_document(report));
    case ReportFormat::csv:
      return emit_csv(report);
    case ReportFormat::text:
      return emit_text(report);
  }
  return {};
}

std::string failure_summary(const SuiteReport& report, int per_check) {
  std::ostringstream os;
  for (const auto& s : report.summary) {
    if (s.failed == 0) continue;
    os << "FAIL " << s.check << ": " << s.failed << "/" << s.count << " records, worst residual "
       << fmt_short(s.worst_residual) << " (tolerance " << fmt_short(s.tolerance) << ")\n";
    std::vector<const CheckRecord*> bad;
    for (const auto& r : report.records)
      if (r.check == s.check && !r.pass) bad.push_back(&r);
    std::stable_sort(bad.begin(), bad.end(), [](const CheckRecord* a, const CheckRecord* b) {
      return (std::isnan(a->residual) ? INFINITY : a->residual) > (std::isnan(b->residual) ? INFINITY : b->residual);
    });
    for (int i = 0; i < per_check && i < static_cast<int>(bad.size()); ++i) {
      const auto* r = bad[static_cast<std::size_t>(i)];
      os << "  ";
      if (r->point_index >= 0)
        os << "point " << r->point_index << " (" << point_text(r->point, ", ") << ")";
      else
        os << "grid";
      os << ": residual " << fmt_short(r->residual);
      if (!r->notes.empty()) os << "; " << joined(r->notes, "; ");
      os << "\n";
    }
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << bytes;
  out.flush();
  if (!out) throw IoError("error writing report '" + path + "'");
}

}  // namespace sforge
