#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace mflab::csv {

/// Shortest text that reads back to the same double.
inline std::string format(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("csv: cannot format number");
  return {buf, ptr};
}

class Writer {
 public:
  Writer(const std::filesystem::path& path, std::span<const std::string> header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out_ << ',';
      out_ << header[c];
    }
    out_ << '\n';
  }
  Writer(const std::filesystem::path& path, std::initializer_list<std::string> header)
      : Writer(path, std::vector<std::string>(header)) {}

  Writer& operator<<(double x) { return field(format(x)); }
  Writer& operator<<(std::string_view s) { return field(std::string(s)); }
  template <class T>
    requires std::is_integral_v<T>
  Writer& operator<<(T v) { return field(std::to_string(v)); }

  void row(std::span<const double> values) {
    for (double v : values) *this << v;
    end_row();
  }

  void end_row() {
    if (filled_ != columns_) throw std::logic_error("csv: row has the wrong number of fields");
    out_ << '\n';
    filled_ = 0;
  }

 private:
  Writer& field(const std::string& text) {
    if (filled_) out_ << ',';
    out_ << text;
    ++filled_;
    return *this;
  }

  std::ofstream out_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

}  // namespace mflab::csv
