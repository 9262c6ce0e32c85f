// Snapshot archive layout (all integers and doubles little-endian):
//
//   char[8]  magic "TLKBEARC"
//   u32      format version (1)
//   u32      grid mode (0 = full, 1 = log)
//   u32      d
//   d times: u64 node count, then that many i64 nodes
//   u64      length of a UTF-8 JSON header, then the header bytes:
//            {"observable": {"terms": [...]}, "stoichiometry": [[...], ...]}
//   f64      tolerance
//   u64      inner step count
//   u64      snapshot count S, then S f64 times (increasing)
//   S times: lattice-size f64 values, first dimension fastest

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "tauleap/error.hpp"
#include "tauleap/kbe.hpp"

namespace tauleap {

namespace {

constexpr std::array<char, 8> kMagic{'T', 'L', 'K', 'B', 'E', 'A', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename U>
void put(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes;
  for (std::size_t b = 0; b < sizeof(U); ++b) bytes[b] = static_cast<char>((v >> (8 * b)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }
void put_i64(std::ostream& out, std::int64_t v) { put(out, static_cast<std::uint64_t>(v)); }

template <typename U>
U get(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ConfigError("value-function archive is truncated");
  U v = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) v |= static_cast<U>(bytes[b]) << (8 * b);
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get<std::uint64_t>(in)); }
std::int64_t get_i64(std::istream& in) { return static_cast<std::int64_t>(get<std::uint64_t>(in)); }

}  // namespace

void write_archive(const ValueFunction& vf, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, vf.lattice.mode() == GridMode::full ? 0u : 1u);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(vf.lattice.dim()));
  for (std::size_t i = 0; i < vf.lattice.dim(); ++i) {
    const auto& nodes = vf.lattice.nodes(i);
    put<std::uint64_t>(out, nodes.size());
    for (auto x : nodes) put_i64(out, x);
  }

  nlohmann::json header;
  header["observable"]["terms"] = nlohmann::json::array();
  for (const auto& term : vf.observable.terms)
    header["observable"]["terms"].push_back({{"coeff", term.coeff}, {"exponents", term.exponents}});
  header["stoichiometry"] = vf.stoichiometry;
  const std::string text = header.dump();
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  put_f64(out, vf.tol);
  put<std::uint64_t>(out, vf.inner_steps);
  put<std::uint64_t>(out, vf.times.size());
  for (double t : vf.times) put_f64(out, t);
  for (const auto& snap : vf.values)
    for (double v : snap) put_f64(out, v);
  if (!out) throw ConfigError("failed writing value-function archive");
}

ValueFunction read_archive(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ConfigError("not a value-function archive (bad magic)");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion)
    throw ConfigError("unsupported value-function archive version " + std::to_string(version));
  const auto mode = get<std::uint32_t>(in);
  if (mode > 1) throw ConfigError("value-function archive has an unknown grid mode");
  const auto d = get<std::uint32_t>(in);
  std::vector<std::vector<std::int64_t>> nodes(d);
  for (auto& list : nodes) {
    const auto count = get<std::uint64_t>(in);
    list.resize(count);
    for (auto& x : list) x = get_i64(in);
  }

  ValueFunction vf;
  vf.lattice = Lattice(mode == 0 ? GridMode::full : GridMode::logarithmic, std::move(nodes));

  const auto len = get<std::uint64_t>(in);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw ConfigError("value-function archive is truncated");
  try {
    const auto header = nlohmann::json::parse(text);
    for (const auto& term : header.at("observable").at("terms"))
      vf.observable.terms.push_back(
          {term.at("coeff").get<double>(), term.at("exponents").get<std::vector<int>>()});
    vf.stoichiometry = header.at("stoichiometry").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("value-function archive header: ") + e.what());
  }

  vf.tol = get_f64(in);
  vf.inner_steps = get<std::uint64_t>(in);
  const auto n_times = get<std::uint64_t>(in);
  vf.times.resize(n_times);
  for (auto& t : vf.times) t = get_f64(in);
  vf.values.assign(n_times, std::vector<double>(vf.lattice.size()));
  for (auto& snap : vf.values)
    for (auto& v : snap) v = get_f64(in);
  return vf;
}

void save_archive(const ValueFunction& vf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_archive(vf, out);
}

ValueFunction load_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open value-function archive '" + path + "'");
  return read_archive(in);
}

}  // namespace tauleap
