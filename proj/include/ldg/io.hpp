#pragma once

// Serialization of fields and tables.
//
// Binary field file ("LDGF", little-endian throughout):
//   bytes 0-3    magic "LDGF"
//   uint32       format version (1)
//   int32 x3     interior dims
//   float64 x3   box lo
//   float64 x3   box hi
//   then one record per node in storage order (i slowest, k fastest):
//   float64 x8   x, y, z, Q11, Q22, Q12, Q13, Q23
//
// CSV field file: header "x,y,z,Q11,Q22,Q12,Q13,Q23", same node order.
// Scalar CSV: header "x,y,z,value". Numbers use 17 significant digits.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ldg/error.hpp"
#include "ldg/field.hpp"

namespace ldg {

/// Shortest-form-independent decimal text: 17 significant digits, general notation.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
  return std::string(buf.data(), r.ptr);
}

/// Strict decimal parse of the whole string.
inline double parse_double(std::string_view text) {
  double v = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size())
    throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
  return v;
}

/// Comma-separated rows with a header; cells are preformatted strings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  CsvTable& row() {
    rows_.emplace_back();
    return *this;
  }
  CsvTable& cell(double v) { return text(format_double(v)); }
  CsvTable& cell(long long v) { return text(std::to_string(v)); }
  CsvTable& cell(int v) { return text(std::to_string(v)); }
  CsvTable& cell(bool v) { return text(v ? "1" : "0"); }
  CsvTable& text(std::string v) {
    if (rows_.empty()) row();
    rows_.back().push_back(std::move(v));
    return *this;
  }

  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_line(os, header_);
    for (const auto& r : rows_) {
      if (r.size() != header_.size()) throw Error(ErrorCode::InvalidArgument, "CSV row width differs from header");
      write_line(os, r);
    }
  }

 private:
  static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, mode | std::ios::trunc);
  if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return os;
}

inline void finish_out(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

template <class U>
void put_le(std::vector<unsigned char>& out, U bits) {
  for (std::size_t b = 0; b < sizeof(U); ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}
inline void put_f64(std::vector<unsigned char>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
 public:
  ByteReader(const std::vector<unsigned char>& data, std::string name) : data_(data), name_(std::move(name)) {}

  template <class U>
  U get_le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(static_cast<U>(data_[pos_ + b]) << (8 * b));
    pos_ += sizeof(U);
    return v;
  }
  double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }
  std::int32_t get_i32() { return std::bit_cast<std::int32_t>(get_le<std::uint32_t>()); }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error(ErrorCode::Io, name_ + ": truncated file");
  }
  const std::vector<unsigned char>& data_;
  std::string name_;
  std::size_t pos_ = 0;
};

inline std::array<double, 5> components(const QTensor& q) {
  const SymMatrix& m = q.sym();
  return {m.xx(), m.yy(), m.xy(), m.xz(), m.yz()};
}

}  // namespace detail

inline constexpr std::uint32_t kFieldFormatVersion = 1;

inline void write_field_binary(const std::filesystem::path& path, const TensorField& f) {
  const GridSpec& g = f.grid();
  std::vector<unsigned char> out{'L', 'D', 'G', 'F'};
  detail::put_le(out, kFieldFormatVersion);
  for (int a = 0; a < 3; ++a) detail::put_le(out, std::bit_cast<std::uint32_t>(static_cast<std::int32_t>(g.dims()[a])));
  for (double v : g.lo()) detail::put_f64(out, v);
  for (double v : g.hi()) detail::put_f64(out, v);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    for (double v : g.position(g.node(idx))) detail::put_f64(out, v);
    for (double v : detail::components(f[idx])) detail::put_f64(out, v);
  }
  auto os = detail::open_out(path, std::ios::binary);
  os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  detail::finish_out(os, path);
}

inline TensorField read_field_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  detail::ByteReader rd(data, path.string());
  char magic[4];
  for (char& c : magic) c = static_cast<char>(rd.get_le<std::uint8_t>());
  if (std::memcmp(magic, "LDGF", 4) != 0) throw Error(ErrorCode::Io, path.string() + ": bad magic");
  if (rd.get_le<std::uint32_t>() != kFieldFormatVersion)
    throw Error(ErrorCode::Io, path.string() + ": unsupported format version");
  std::array<int, 3> dims{};
  Vec3 lo{}, hi{};
  for (int& d : dims) d = rd.get_i32();
  for (double& v : lo) v = rd.get_f64();
  for (double& v : hi) v = rd.get_f64();
  TensorField f(GridSpec(dims, lo, hi));
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    for (int a = 0; a < 3; ++a) rd.get_f64();
    std::array<double, 5> c{};
    for (double& v : c) v = rd.get_f64();
    f[idx] = QTensor(c[0], c[1], c[2], c[3], c[4]);
  }
  if (!rd.done()) throw Error(ErrorCode::Io, path.string() + ": trailing bytes");
  return f;
}

inline void write_field_csv(std::ostream& os, const TensorField& f) {
  const GridSpec& g = f.grid();
  os << "x,y,z,Q11,Q22,Q12,Q13,Q23\n";
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const Vec3 x = g.position(g.node(idx));
    os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]);
    for (double v : detail::components(f[idx])) os << ',' << format_double(v);
    os << '\n';
  }
}

inline void write_field_csv(const std::filesystem::path& path, const TensorField& f) {
  auto os = detail::open_out(path);
  write_field_csv(os, f);
  detail::finish_out(os, path);
}

inline void write_scalar_csv(std::ostream& os, const ScalarField& f) {
  const GridSpec& g = f.grid();
  os << "x,y,z,value\n";
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const Vec3 x = g.position(g.node(idx));
    os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(x[2]) << ','
       << format_double(f[idx]) << '\n';
  }
}

inline void write_scalar_csv(const std::filesystem::path& path, const ScalarField& f) {
  auto os = detail::open_out(path);
  write_scalar_csv(os, f);
  detail::finish_out(os, path);
}

inline void write_table(const std::filesystem::path& path, const CsvTable& t) {
  auto os = detail::open_out(path);
  t.write(os);
  detail::finish_out(os, path);
}

}  // namespace ldg
