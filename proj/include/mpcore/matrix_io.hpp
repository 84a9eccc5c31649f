#pragma once

// Plain-text matrix files.
//
//   mpmat <rows> <cols> <tag> <bits>
//   <row 0 entries>
//   ...
//
// Entries are space-separated. tag is dd, td or qd (K = 2, 3, 4 hex-floats
// per entry, one per component, most significant first) or bf (one exact big
// hex-float per entry). bits is the precision of the stored values; every bf
// entry fits in it, so reading back at that precision is exact. Vectors are
// stored as n x 1 matrices.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "mpcore/bigfloat.hpp"
#include "mpcore/matrix.hpp"
#include "mpcore/mcfloat.hpp"

namespace mpcore {

struct MatrixHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string tag;
  int bits = 0;
};

using AnyMatrix = std::variant<DenseMatrix<MultiComp<2>>, DenseMatrix<MultiComp<3>>,
                               DenseMatrix<MultiComp<4>>, DenseMatrix<BigFloat>>;

void write_matrix(std::ostream& os, const DenseMatrix<BigFloat>& a, int bits);
template <int K>
void write_matrix(std::ostream& os, const DenseMatrix<MultiComp<K>>& a);

/// Reads any tag. Throws ParseError on malformed input.
AnyMatrix read_matrix(std::istream& is, MatrixHeader* header = nullptr);

/// Reads a file and converts it to BigFloat: bf entries as stored, MultiComp
/// entries as their exact component sums.
DenseMatrix<BigFloat> read_bigfloat_matrix(std::istream& is, MatrixHeader* header = nullptr);

void save_matrix(const std::filesystem::path& path, const DenseMatrix<BigFloat>& a, int bits);
DenseMatrix<BigFloat> load_bigfloat_matrix(const std::filesystem::path& path,
                                           MatrixHeader* header = nullptr);

void save_vector(const std::filesystem::path& path, const Vector<BigFloat>& v, int bits);
Vector<BigFloat> load_bigfloat_vector(const std::filesystem::path& path,
                                      MatrixHeader* header = nullptr);

Vector<BigFloat> column_to_vector(const DenseMatrix<BigFloat>& a);
DenseMatrix<BigFloat> vector_to_column(const Vector<BigFloat>& v);

}  // namespace mpcore
