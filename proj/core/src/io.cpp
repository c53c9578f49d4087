#include "sphnet/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "sphnet/errors.hpp"

namespace sphnet {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return fnv1a64(ss.str());
}

namespace {

static_assert(sizeof(double) == 8);

void put_u32(std::ostream& os, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw format_error("truncated " + what);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix_file(const std::string& path, const std::vector<double>& m, int dim) {
  if (static_cast<int>(m.size()) != dim * dim)
    throw contract_error("matrix file: size/dimension mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot write file: " + path);
  f.write("SPHH", 4);
  put_u32(f, 1u);
  put_u32(f, static_cast<std::uint32_t>(dim));
  // Host is little-endian on every supported target.
  f.write(reinterpret_cast<const char*>(m.data()),
          static_cast<std::streamsize>(m.size() * sizeof(double)));
  if (!f) throw format_error("short write: " + path);
}

std::vector<double> read_matrix_file(const std::string& path, int& dim) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open file: " + path);
  char magic[4];
  if (!f.read(magic, 4) || std::memcmp(magic, "SPHH", 4) != 0)
    throw format_error("bad matrix magic: " + path);
  const std::uint32_t version = get_u32(f, "matrix version");
  if (version != 1u) throw format_error("unsupported matrix version: " + path);
  dim = static_cast<int>(get_u32(f, "matrix dimension"));
  std::vector<double> m(static_cast<size_t>(dim) * dim);
  if (!f.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double))))
    throw format_error("truncated matrix payload: " + path);
  return m;
}

int element_number(const std::string& symbol) {
  if (symbol == "H") return 1;
  if (symbol == "C") return 6;
  if (symbol == "N") return 7;
  if (symbol == "O") return 8;
  throw format_error("unknown element symbol: " + symbol);
}

std::string element_symbol(int z) {
  switch (z) {
    case 1: return "H";
    case 6: return "C";
    case 7: return "N";
    case 8: return "O";
    default: throw format_error("unknown atomic number: " + std::to_string(z));
  }
}

void write_xyz_file(const std::string& path, const XyzRecord& rec) {
  std::ofstream f(path);
  if (!f) throw format_error("cannot write file: " + path);
  f << rec.z.size() << "\n" << rec.comment << "\n";
  f.precision(17);
  for (size_t i = 0; i < rec.z.size(); ++i)
    f << element_symbol(rec.z[i]) << " " << rec.pos[i][0] << " " << rec.pos[i][1] << " "
      << rec.pos[i][2] << "\n";
  if (!f) throw format_error("short write: " + path);
}

XyzRecord read_xyz_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw format_error("cannot open file: " + path);
  auto next_line = [&](std::string& line) {
    if (!std::getline(f, line)) return false;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    return true;
  };
  std::string line;
  if (!next_line(line)) throw format_error("empty XYZ file: " + path);
  int count = 0;
  try {
    count = std::stoi(line);
  } catch (const std::exception&) {
    throw format_error("bad XYZ atom count: " + path);
  }
  XyzRecord rec;
  if (!next_line(rec.comment)) throw format_error("missing XYZ comment line: " + path);
  for (int i = 0; i < count; ++i) {
    if (!next_line(line)) throw format_error("truncated XYZ body: " + path);
    std::istringstream ls(line);
    std::string sym;
    std::array<double, 3> p{};
    if (!(ls >> sym >> p[0] >> p[1] >> p[2]))
      throw format_error("bad XYZ atom line: " + path);
    rec.z.push_back(element_number(sym));
    rec.pos.push_back(p);
  }
  // Trailing blank lines are tolerated; anything else is a format error.
  while (next_line(line))
    if (!line.empty() && line.find_first_not_of(" \t") != std::string::npos)
      throw format_error("trailing junk in XYZ file: " + path);
  return rec;
}

}  // namespace sphnet
