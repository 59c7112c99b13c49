#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairalloc {

/// "%.17g"; non-finite values have no JSON form and come out as null.
std::string format_double(double v);

/// Streaming writer with insertion-ordered keys and two-space indentation.
/// The caller is responsible for balanced begin/end calls.
class JsonWriter {
 public:
  JsonWriter& begin_object(std::string_view key = {});
  JsonWriter& end_object();
  JsonWriter& field(std::string_view key, double v);
  JsonWriter& field(std::string_view key, std::uint64_t v);
  JsonWriter& field(std::string_view key, bool v);
  JsonWriter& field(std::string_view key, std::string_view v);
  JsonWriter& field(std::string_view key, const char* v) { return field(key, std::string_view(v)); }
  JsonWriter& field(std::string_view key, std::span<const double> v);
  JsonWriter& field(std::string_view key, std::span<const std::size_t> v);
  JsonWriter& null_field(std::string_view key);

  const std::string& str() const noexcept { return out_; }

 private:
  void open_key(std::string_view key);
  void newline();

  std::string out_;
  std::vector<bool> first_;  // per open object: no member written yet
};

}  // namespace fairalloc
