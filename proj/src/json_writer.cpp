#include "json_writer.hpp"

#include <cmath>
#include <cstdio>

namespace fairalloc {

namespace {

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * first_.size(), ' ');
}

void JsonWriter::open_key(std::string_view key) {
  if (first_.empty()) return;
  if (!first_.back()) out_ += ',';
  first_.back() = false;
  newline();
  if (!key.empty()) out_ += quoted(key) + ": ";
}

JsonWriter& JsonWriter::begin_object(std::string_view key) {
  open_key(key);
  out_ += '{';
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += '}';
  if (first_.empty()) out_ += '\n';
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, double v) {
  open_key(key);
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, std::uint64_t v) {
  open_key(key);
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, bool v) {
  open_key(key);
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, std::string_view v) {
  open_key(key);
  out_ += quoted(v);
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, std::span<const double> v) {
  open_key(key);
  out_ += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out_ += ", ";
    out_ += format_double(v[i]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::field(std::string_view key, std::span<const std::size_t> v) {
  open_key(key);
  out_ += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out_ += ", ";
    out_ += std::to_string(v[i]);
  }
  out_ += ']';
  return *this;
}

JsonWriter& JsonWriter::null_field(std::string_view key) {
  open_key(key);
  out_ += "null";
  return *this;
}

}  // namespace fairalloc
