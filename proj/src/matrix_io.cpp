#include "mpcore/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mpcore/linalg.hpp"

namespace mpcore {

namespace {

const char* tag_for(int k) {
  switch (k) {
    case 2: return "dd";
    case 3: return "td";
    case 4: return "qd";
  }
  return "?";
}

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double_token(const std::string& tok) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw ParseError("matrix file: bad binary64 entry '" + tok + "'");
  }
  return v;
}

std::string next_token(std::istream& is, const char* what) {
  std::string tok;
  if (!(is >> tok)) throw ParseError(std::string("matrix file: missing ") + what);
  return tok;
}

std::size_t parse_count(const std::string& tok, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || tok.empty() || tok[0] == '-') {
    throw ParseError(std::string("matrix file: bad ") + what + " '" + tok + "'");
  }
  return static_cast<std::size_t>(v);
}

MatrixHeader read_header(std::istream& is) {
  if (next_token(is, "magic") != "mpmat") throw ParseError("matrix file: missing 'mpmat' magic");
  MatrixHeader h;
  h.rows = parse_count(next_token(is, "row count"), "row count");
  h.cols = parse_count(next_token(is, "column count"), "column count");
  h.tag = next_token(is, "scalar tag");
  const std::size_t bits = parse_count(next_token(is, "precision"), "precision");
  if (bits < 2 || bits > (1u << 24)) throw ParseError("matrix file: precision out of range");
  h.bits = static_cast<int>(bits);
  if (h.rows == 0 || h.cols == 0) throw ParseError("matrix file: empty shape");
  if (h.rows > (1u << 20) || h.cols > (1u << 20)) throw ParseError("matrix file: shape too large");
  return h;
}

template <int K>
DenseMatrix<MultiComp<K>> read_mc_body(std::istream& is, const MatrixHeader& h) {
  if (h.bits != 53 * K) throw ParseError("matrix file: precision does not match tag");
  DenseMatrix<MultiComp<K>> a(h.rows, h.cols);
  for (auto& e : a.data()) {
    for (int c = 0; c < K; ++c) e.c[c] = parse_double_token(next_token(is, "entry"));
    if (!is_normalized(e)) throw ParseError("matrix file: entry not in canonical form");
  }
  return a;
}

DenseMatrix<BigFloat> read_bf_body(std::istream& is, const MatrixHeader& h) {
  const PrecisionContext ctx{h.bits};
  DenseMatrix<BigFloat> a(h.rows, h.cols);
  for (auto& e : a.data()) e = bf_parse_hex(next_token(is, "entry"), ctx);
  return a;
}

void expect_end(std::istream& is) {
  std::string extra;
  if (is >> extra) throw ParseError("matrix file: trailing data '" + extra + "'");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_matrix(std::ostream& os, const DenseMatrix<BigFloat>& a, int bits) {
  for (const auto& e : a.data()) {
    if (e.significant_bits() > bits) {
      throw DomainError("write_matrix: entry needs more than the declared precision");
    }
  }
  os << "mpmat " << a.rows() << ' ' << a.cols() << " bf " << bits << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) os << ' ';
      os << bf_format_hex(a(i, j));
    }
    os << '\n';
  }
}

template <int K>
void write_matrix(std::ostream& os, const DenseMatrix<MultiComp<K>>& a) {
  os << "mpmat " << a.rows() << ' ' << a.cols() << ' ' << tag_for(K) << ' ' << 53 * K << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      for (int c = 0; c < K; ++c) {
        if (j || c) os << ' ';
        os << hex_double(a(i, j).c[c]);
      }
    }
    os << '\n';
  }
}

template void write_matrix<2>(std::ostream&, const DenseMatrix<MultiComp<2>>&);
template void write_matrix<3>(std::ostream&, const DenseMatrix<MultiComp<3>>&);
template void write_matrix<4>(std::ostream&, const DenseMatrix<MultiComp<4>>&);

AnyMatrix read_matrix(std::istream& is, MatrixHeader* header) {
  const MatrixHeader h = read_header(is);
  if (header) *header = h;
  AnyMatrix out;
  if (h.tag == "dd") {
    out = read_mc_body<2>(is, h);
  } else if (h.tag == "td") {
    out = read_mc_body<3>(is, h);
  } else if (h.tag == "qd") {
    out = read_mc_body<4>(is, h);
  } else if (h.tag == "bf") {
    out = read_bf_body(is, h);
  } else {
    throw ParseError("matrix file: unknown scalar tag '" + h.tag + "'");
  }
  expect_end(is);
  return out;
}

DenseMatrix<BigFloat> read_bigfloat_matrix(std::istream& is, MatrixHeader* header) {
  MatrixHeader h;
  AnyMatrix any = read_matrix(is, &h);
  if (header) *header = h;
  return std::visit(
      [&](auto& m) -> DenseMatrix<BigFloat> {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DenseMatrix<BigFloat>>) {
          return std::move(m);
        } else {
          constexpr int K = M::Scalar::kComponents;
          return to_bigfloat_exact<K>(m);
        }
      },
      any);
}

void save_matrix(const std::filesystem::path& path, const DenseMatrix<BigFloat>& a, int bits) {
  std::ostringstream os;
  write_matrix(os, a, bits);
  write_file(path, os.str());
}

DenseMatrix<BigFloat> load_bigfloat_matrix(const std::filesystem::path& path,
                                           MatrixHeader* header) {
  std::ifstream in = open_in(path);
  return read_bigfloat_matrix(in, header);
}

void save_vector(const std::filesystem::path& path, const Vector<BigFloat>& v, int bits) {
  save_matrix(path, vector_to_column(v), bits);
}

Vector<BigFloat> load_bigfloat_vector(const std::filesystem::path& path, MatrixHeader* header) {
  MatrixHeader h;
  DenseMatrix<BigFloat> m = load_bigfloat_matrix(path, &h);
  if (header) *header = h;
  if (h.cols != 1) throw ParseError("vector file: expected a single column");
  return column_to_vector(m);
}

Vector<BigFloat> column_to_vector(const DenseMatrix<BigFloat>& a) {
  if (a.cols() != 1) throw DimensionError("column_to_vector: more than one column");
  Vector<BigFloat> v(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) v[i] = a(i, 0);
  return v;
}

DenseMatrix<BigFloat> vector_to_column(const Vector<BigFloat>& v) {
  DenseMatrix<BigFloat> a(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) a(i, 0) = v[i];
  return a;
}

}  // namespace mpcore
