#include "carleman/fieldio.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "carleman/util.hpp"

namespace carleman {

namespace {

void put_i64(std::FILE* fp, std::int64_t v) { std::fwrite(&v, sizeof v, 1, fp); }
void put_f64(std::FILE* fp, double v) { std::fwrite(&v, sizeof v, 1, fp); }

std::int64_t get_i64(std::FILE* fp) {
  std::int64_t v = 0;
  require(std::fread(&v, sizeof v, 1, fp) == 1, ErrorCode::IO_ERROR, "truncated container");
  return v;
}

double get_f64(std::FILE* fp) {
  double v = 0;
  require(std::fread(&v, sizeof v, 1, fp) == 1, ErrorCode::IO_ERROR, "truncated container");
  return v;
}

struct FileCloser {
  std::FILE* fp;
  ~FileCloser() { if (fp) std::fclose(fp); }
};

std::FILE* open_or_fail(const std::string& path, const char* mode) {
  std::FILE* fp = std::fopen(path.c_str(), mode);
  require(fp != nullptr, ErrorCode::IO_ERROR, "cannot open " + path);
  return fp;
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
  std::FILE* fp = open_or_fail(path, "wb");
  FileCloser guard{fp};
  const Grid& g = f.grid();
  put_i64(fp, g.dim());
  for (int a = 0; a < g.dim(); ++a) put_i64(fp, g.nx(a));
  put_i64(fp, g.nt());
  for (int a = 0; a < g.dim(); ++a) put_f64(fp, g.hx(a));
  put_f64(fp, g.ht());
  std::fwrite(f.values().data(), sizeof(double), f.values().size(), fp);
}

Field read_field(const std::string& path, const Box& box, double T) {
  std::FILE* fp = open_or_fail(path, "rb");
  FileCloser guard{fp};
  int dim = static_cast<int>(get_i64(fp));
  require(dim == box.dim, ErrorCode::IO_ERROR, "container dim does not match geometry");
  std::array<int, kMaxDim> nx{1, 1, 1};
  for (int a = 0; a < dim; ++a) nx[static_cast<std::size_t>(a)] = static_cast<int>(get_i64(fp));
  int nt = static_cast<int>(get_i64(fp));
  for (int a = 0; a < dim; ++a) {
    double hx = get_f64(fp);
    double expect = box.edge(a) / (nx[static_cast<std::size_t>(a)] - 1);
    require(std::abs(hx - expect) <= 1e-9 * std::max(1.0, std::abs(expect)), ErrorCode::IO_ERROR,
            "container spacing does not match the box");
  }
  double ht = get_f64(fp);
  (void)ht;
  Grid g(box, nx, nt > 1 ? T : 0.0, nt);
  Field f(g);
  require(std::fread(f.values().data(), sizeof(double), f.values().size(), fp) ==
              f.values().size(),
          ErrorCode::IO_ERROR, "truncated field data in " + path);
  return f;
}

void write_traces(const std::string& path, const std::vector<FaceTrace>& traces, int dim,
                  double ht) {
  std::FILE* fp = open_or_fail(path, "wb");
  FileCloser guard{fp};
  put_i64(fp, dim);
  put_i64(fp, static_cast<std::int64_t>(traces.size()));
  put_i64(fp, traces.empty() ? 0 : traces.front().nt);
  put_f64(fp, ht);
  for (const auto& t : traces) {
    put_i64(fp, t.axis);
    put_i64(fp, t.side);
    put_i64(fp, t.tangential_nodes);
    std::fwrite(t.v.data(), sizeof(double), t.v.size(), fp);
  }
}

std::vector<FaceTrace> read_traces(const std::string& path) {
  std::FILE* fp = open_or_fail(path, "rb");
  FileCloser guard{fp};
  get_i64(fp);  // dim
  std::int64_t n_faces = get_i64(fp);
  int nt = static_cast<int>(get_i64(fp));
  get_f64(fp);  // ht
  std::vector<FaceTrace> out;
  for (std::int64_t i = 0; i < n_faces; ++i) {
    FaceTrace t;
    t.axis = static_cast<int>(get_i64(fp));
    t.side = static_cast<int>(get_i64(fp));
    t.tangential_nodes = get_i64(fp);
    t.nt = nt;
    t.v.resize(static_cast<std::size_t>(t.tangential_nodes * nt));
    require(std::fread(t.v.data(), sizeof(double), t.v.size(), fp) == t.v.size(),
            ErrorCode::IO_ERROR, "truncated trace data in " + path);
    out.push_back(std::move(t));
  }
  return out;
}

void write_coeffs(const std::string& path, const CoeffVector& B, int dim, const BasisSpec& spec) {
  std::FILE* fp = open_or_fail(path, "wb");
  FileCloser guard{fp};
  put_i64(fp, dim);
  put_i64(fp, spec.degree);
  put_i64(fp, spec.m);
  for (int a = 0; a < dim; ++a) put_i64(fp, spec.k_x[static_cast<std::size_t>(a)]);
  put_i64(fp, spec.k_t);
  put_i64(fp, B.size());
  std::fwrite(B.data(), sizeof(double), static_cast<std::size_t>(B.size()), fp);
}

CoeffVector read_coeffs(const std::string& path, int dim, const BasisSpec& spec) {
  std::FILE* fp = open_or_fail(path, "rb");
  FileCloser guard{fp};
  require(get_i64(fp) == dim, ErrorCode::IO_ERROR, "coefficient dim mismatch");
  require(get_i64(fp) == spec.degree, ErrorCode::IO_ERROR, "coefficient degree mismatch");
  require(get_i64(fp) == spec.m, ErrorCode::IO_ERROR, "coefficient order mismatch");
  for (int a = 0; a < dim; ++a)
    require(get_i64(fp) == spec.k_x[static_cast<std::size_t>(a)], ErrorCode::IO_ERROR,
            "coefficient k mismatch");
  require(get_i64(fp) == spec.k_t, ErrorCode::IO_ERROR, "coefficient k_t mismatch");
  std::int64_t n = get_i64(fp);
  CoeffVector B(n);
  require(std::fread(B.data(), sizeof(double), static_cast<std::size_t>(n), fp) ==
              static_cast<std::size_t>(n),
          ErrorCode::IO_ERROR, "truncated coefficient data in " + path);
  return B;
}

void write_field_csv(const std::string& path, const Field& f) {
  std::FILE* fp = open_or_fail(path, "w");
  FileCloser guard{fp};
  const Grid& g = f.grid();
  for (int a = 0; a < g.dim(); ++a) std::fprintf(fp, "x%d,", a);
  std::fprintf(fp, g.nt() > 1 ? "t,value\n" : "value\n");
  double x[kMaxDim];
  for (std::int64_t s = 0; s < g.spatial_nodes(); ++s) {
    g.node_point(s, x);
    for (int it = 0; it < g.nt(); ++it) {
      for (int a = 0; a < g.dim(); ++a) std::fprintf(fp, "%.17g,", x[a]);
      if (g.nt() > 1) std::fprintf(fp, "%.17g,", g.time(it));
      std::fprintf(fp, "%.17g\n", f.at(s, it));
    }
  }
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns) {
  std::FILE* fp = open_or_fail(path, "w");
  fp_ = fp;
  std::string head;
  for (std::size_t i = 0; i < columns.size(); ++i)
    head += (i ? "," : "") + columns[i];
  std::fprintf(fp, "%s\n", head.c_str());
}

CsvWriter::~CsvWriter() {
  if (fp_) std::fclose(static_cast<std::FILE*>(fp_));
}

void CsvWriter::row(const std::vector<double>& values) {
  std::FILE* fp = static_cast<std::FILE*>(fp_);
  for (std::size_t i = 0; i < values.size(); ++i)
    std::fprintf(fp, i ? ",%.17g" : "%.17g", values[i]);
  std::fprintf(fp, "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::IO_ERROR, "cannot open " + path);
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::IO_ERROR, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool file_exists(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (fp) std::fclose(fp);
  return fp != nullptr;
}

}  // namespace carleman
