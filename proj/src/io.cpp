#include "parlab/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace parlab {

namespace {

void put_le64(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t swapped = 0;
    for (int i = 0; i < 8; ++i)
      swapped |= ((bits >> (8 * i)) & 0xffull) << (8 * (7 - i));
    bits = swapped;
  }
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.write(buf, 8);
}

std::ofstream open_binary(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
  return out;
}

}  // namespace

void dump_coefficients(const CoefficientField& A, const std::filesystem::path& base) {
  const Grid& g = *A.grid;
  auto bin = base;
  bin += ".bin";
  {
    auto out = open_binary(bin);
    for (const auto& piece : A.pieces)
      for (int i = 0; i < g.cells(); ++i)
        for (int r = 0; r < g.dim; ++r)
          for (int c = 0; c < g.dim; ++c) {
            put_le64(out, piece[i](r, c).real());
            put_le64(out, piece[i](r, c).imag());
          }
  }
  nlohmann::json side;
  side["layout"] = "piece-major, cell-major, row-major (re, im) float64 LE";
  side["grid"] = {{"dim", g.dim}, {"n", g.points_per_axis}, {"period", g.period}};
  side["pieces"] = A.piece_count();
  side["cells"] = g.cells();
  side["matrix_dim"] = g.dim;
  side["breakpoints"] = A.breakpoints;
  auto sidecar = base;
  sidecar += ".json";
  write_text_file(sidecar, side.dump(2) + "\n");
}

void dump_field(const SpaceField& f, const std::filesystem::path& base,
                const nlohmann::json& extra) {
  const Grid& g = *f.grid;
  auto bin = base;
  bin += ".bin";
  {
    auto out = open_binary(bin);
    for (Eigen::Index i = 0; i < f.values.size(); ++i) {
      put_le64(out, f.values(i).real());
      put_le64(out, f.values(i).imag());
    }
  }
  nlohmann::json side = extra;
  side["layout"] = "component-major, cell-major (re, im) float64 LE";
  side["grid"] = {{"dim", g.dim}, {"n", g.points_per_axis}, {"period", g.period}};
  side["arity"] = f.arity;
  side["cells"] = g.cells();
  auto sidecar = base;
  sidecar += ".json";
  write_text_file(sidecar, side.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
}

}  // namespace parlab
