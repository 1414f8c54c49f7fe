#pragma once

#include <string>

#include "carleman/basis.hpp"
#include "carleman/wave.hpp"

namespace carleman {

// Flat binary field container: little-endian header
//   int64 dim, int64 n_x[dim], int64 n_t, double h_x[dim], double h_t
// followed by row-major float64 values (time fastest). Node coordinates come
// from the geometry config stored alongside; readers pass the box.
void write_field(const std::string& path, const Field& f);
Field read_field(const std::string& path, const Box& box, double T);

// Boundary traces: header int64 dim, int64 n_faces, int64 n_t, double h_t,
// then per face int64 axis, int64 side, int64 tangential_nodes and the
// values.
void write_traces(const std::string& path, const std::vector<FaceTrace>& traces, int dim,
                  double ht);
std::vector<FaceTrace> read_traces(const std::string& path);

// Coefficient vectors carry the basis signature:
//   int64 dim, degree, m, k_x[dim], k_t, size; float64 entries.
void write_coeffs(const std::string& path, const CoeffVector& B, int dim, const BasisSpec& spec);
CoeffVector read_coeffs(const std::string& path, int dim, const BasisSpec& spec);

// CSV export: one row per node, coordinates then value.
void write_field_csv(const std::string& path, const Field& f);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  void row(const std::vector<double>& values);

 private:
  void* fp_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace carleman
