// Copyright 2026 The lppf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lppf/data_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "lppf/errors.hpp"

namespace lppf {

namespace {

constexpr char kPrivatizedMagic[8] = {'L', 'P', 'P', 'F', 'P', 'R', 'I', 'V'};
constexpr char kTraceMagic[8] = {'L', 'P', 'P', 'F', 'T', 'R', 'C', 'E'};
constexpr char kFactorsMagic[8] = {'L', 'P', 'P', 'F', 'F', 'A', 'C', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

std::ifstream open_input(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_output(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw ParseError("unexpected end of file reading " + what);
  return value;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const std::string& what) {
  const std::uint32_t len = read_pod<std::uint32_t>(in, what);
  std::string s(len, '\0');
  in.read(s.data(), static_cast<std::streamsize>(len));
  if (!in) throw ParseError("unexpected end of file reading " + what);
  return s;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) write_pod<double>(out, m(i, j));
  }
}

Matrix read_matrix(std::istream& in, Index rows, Index cols,
                   const std::string& what) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = read_pod<double>(in, what);
  }
  return m;
}

void expect_magic(std::istream& in, const char (&magic)[8],
                  const std::string& what) {
  char got[8];
  in.read(got, 8);
  if (!in || std::memcmp(got, magic, 8) != 0) {
    throw ParseError("bad magic: not a " + what + " file");
  }
  const std::uint32_t version = read_pod<std::uint32_t>(in, what + " version");
  if (version != kFormatVersion) {
    throw ParseError("unsupported " + what + " format version " +
                     std::to_string(version));
  }
}

}  // namespace

CountMatrix read_sparse_counts(const std::string& path) {
  std::ifstream in = open_input(path, false);
  CountMatrix out;
  std::string line;
  long line_no = 0;
  long long declared_nnz = -1;

  auto next_data_line = [&](std::string& target) {
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;  // blank
      if (line[first] == '#') continue;          // comment
      target = line;
      return true;
    }
    return false;
  };

  std::string data;
  if (!next_data_line(data)) {
    throw ParseError("missing header line 'rows cols nnz'", line_no);
  }
  {
    std::istringstream header(data);
    long long rows = 0, cols = 0;
    std::string extra;
    if (!(header >> rows >> cols >> declared_nnz) || (header >> extra)) {
      throw ParseError("malformed header, expected 'rows cols nnz'", line_no);
    }
    if (rows <= 0 || cols <= 0 || declared_nnz < 0) {
      throw ParseError("header values out of range", line_no);
    }
    out.n_rows = rows;
    out.n_cols = cols;
  }

  out.entries.reserve(static_cast<std::size_t>(declared_nnz));
  for (long long k = 0; k < declared_nnz; ++k) {
    if (!next_data_line(data)) {
      throw ParseError("expected " + std::to_string(declared_nnz) +
                           " entries, file ended after " + std::to_string(k),
                       line_no);
    }
    std::istringstream entry(data);
    long long r = 0, c = 0, count = 0;
    std::string extra;
    if (!(entry >> r >> c >> count) || (entry >> extra)) {
      throw ParseError("malformed entry, expected 'row col count'", line_no);
    }
    if (r < 0 || r >= out.n_rows || c < 0 || c >= out.n_cols) {
      throw ParseError("entry (" + std::to_string(r) + "," + std::to_string(c) +
                           ") out of bounds",
                       line_no);
    }
    if (count < 0) throw ParseError("negative count", line_no);
    out.entries.push_back({static_cast<Index>(r), static_cast<Index>(c), count});
  }
  if (next_data_line(data)) {
    throw ParseError("trailing content after the declared entries", line_no);
  }
  out.validate_and_normalize();  // catches duplicate keys
  return out;
}

void write_sparse_counts(const std::string& path, const CountMatrix& counts) {
  std::ofstream out = open_output(path, false);
  out << counts.n_rows << " " << counts.n_cols << " " << counts.entries.size()
      << "\n";
  for (const CountEntry& e : counts.entries) {
    out << e.row << " " << e.col << " " << e.count << "\n";
  }
  if (!out) throw ParseError("write failed for '" + path + "'");
}

void write_privatized(const std::string& path, const PrivatizedMatrix& matrix) {
  matrix.params.check();
  std::ofstream out = open_output(path, true);
  out.write(kPrivatizedMagic, 8);
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::int64_t>(out, matrix.values.rows());
  write_pod<std::int64_t>(out, matrix.values.cols());
  write_pod<std::int64_t>(out, matrix.params.precision_n);
  write_pod<double>(out, matrix.params.epsilon);
  write_pod<double>(out, matrix.params.alpha);
  write_pod<std::uint8_t>(out, matrix.truncated ? 1 : 0);
  write_pod<std::uint64_t>(out, matrix.seed);
  write_string(out, matrix.params.observation_granularity);
  for (Index i = 0; i < matrix.values.rows(); ++i) {
    for (Index j = 0; j < matrix.values.cols(); ++j) {
      write_pod<std::int64_t>(out, matrix.values(i, j));
    }
  }
  if (!out) throw ParseError("write failed for '" + path + "'");
}

PrivatizedMatrix read_privatized(const std::string& path) {
  std::ifstream in = open_input(path, true);
  expect_magic(in, kPrivatizedMagic, "privatized matrix");
  const auto rows = read_pod<std::int64_t>(in, "rows");
  const auto cols = read_pod<std::int64_t>(in, "cols");
  if (rows <= 0 || cols <= 0) throw ParseError("bad dimensions in header");
  PrivatizedMatrix out;
  out.params.precision_n = read_pod<std::int64_t>(in, "precision");
  out.params.epsilon = read_pod<double>(in, "epsilon");
  out.params.alpha = read_pod<double>(in, "alpha");
  out.truncated = read_pod<std::uint8_t>(in, "truncated flag") != 0;
  out.seed = read_pod<std::uint64_t>(in, "seed");
  out.params.observation_granularity = read_string(in, "granularity label");
  out.params.check();
  out.values.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out.values(i, j) = read_pod<std::int64_t>(in, "matrix payload");
    }
  }
  if (out.truncated && (out.values.array() < 0).any()) {
    throw ParseError("truncated matrix contains negative values");
  }
  return out;
}

namespace {

std::pair<Index, Index> factor_dims(ModelKind kind, Index data_rows,
                                    Index data_cols, int factors, bool second) {
  if (kind == ModelKind::topic) {
    return second ? std::pair<Index, Index>{factors, data_cols}
                  : std::pair<Index, Index>{data_rows, factors};
  }
  return second ? std::pair<Index, Index>{factors, factors}
                : std::pair<Index, Index>{data_rows, factors};
}

}  // namespace

void write_trace(const std::string& path, const SampleTrace& trace) {
  std::ofstream out = open_output(path, true);
  out.write(kTraceMagic, 8);
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::uint8_t>(out, trace.model_kind == ModelKind::topic ? 0 : 1);
  write_pod<std::uint8_t>(out, trace.include_diagonal ? 1 : 0);
  write_pod<std::int64_t>(out, trace.data_rows);
  write_pod<std::int64_t>(out, trace.data_cols);
  write_pod<std::int32_t>(out, trace.factors);
  write_pod<std::int64_t>(out, trace.schedule.total_iters);
  write_pod<std::int64_t>(out, trace.schedule.burn_in);
  write_pod<std::int64_t>(out, trace.schedule.thin);
  write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(trace.schedule.mode));
  write_pod<std::uint64_t>(out, trace.seed);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(trace.samples.size()));
  for (const FactorSample& s : trace.samples) {
    write_matrix(out, s.theta);
    write_matrix(out, s.second);
  }
  write_matrix(out, trace.posterior_mean_rates);
  write_pod<std::uint64_t>(out, trace.log_joint.size());
  for (double v : trace.log_joint) write_pod<double>(out, v);
  if (!out) throw ParseError("write failed for '" + path + "'");
}

SampleTrace read_trace(const std::string& path) {
  std::ifstream in = open_input(path, true);
  expect_magic(in, kTraceMagic, "sample trace");
  SampleTrace trace;
  trace.model_kind =
      read_pod<std::uint8_t>(in, "model kind") == 0 ? ModelKind::topic
                                                    : ModelKind::mmsb;
  trace.include_diagonal = read_pod<std::uint8_t>(in, "diagonal flag") != 0;
  trace.data_rows = read_pod<std::int64_t>(in, "rows");
  trace.data_cols = read_pod<std::int64_t>(in, "cols");
  trace.factors = read_pod<std::int32_t>(in, "factors");
  if (trace.data_rows <= 0 || trace.data_cols <= 0 || trace.factors <= 0) {
    throw ParseError("bad dimensions in trace header");
  }
  trace.schedule.total_iters = read_pod<std::int64_t>(in, "total_iters");
  trace.schedule.burn_in = read_pod<std::int64_t>(in, "burn_in");
  trace.schedule.thin = read_pod<std::int64_t>(in, "thin");
  const std::uint8_t mode = read_pod<std::uint8_t>(in, "mode");
  if (mode > 2) throw ParseError("bad mode byte in trace header");
  trace.schedule.mode = static_cast<FitMode>(mode);
  trace.seed = read_pod<std::uint64_t>(in, "seed");
  const std::uint32_t n_samples = read_pod<std::uint32_t>(in, "sample count");
  const auto [t_rows, t_cols] = factor_dims(trace.model_kind, trace.data_rows,
                                            trace.data_cols, trace.factors,
                                            false);
  const auto [s_rows, s_cols] = factor_dims(trace.model_kind, trace.data_rows,
                                            trace.data_cols, trace.factors,
                                            true);
  trace.samples.reserve(n_samples);
  for (std::uint32_t s = 0; s < n_samples; ++s) {
    FactorSample sample;
    sample.theta = read_matrix(in, t_rows, t_cols, "theta sample");
    sample.second = read_matrix(in, s_rows, s_cols, "factor sample");
    trace.samples.push_back(std::move(sample));
  }
  trace.posterior_mean_rates =
      read_matrix(in, trace.data_rows, trace.data_cols, "posterior mean rates");
  const std::uint64_t n_logjoint = read_pod<std::uint64_t>(in, "log joint size");
  trace.log_joint.resize(n_logjoint);
  for (std::uint64_t i = 0; i < n_logjoint; ++i) {
    trace.log_joint[i] = read_pod<double>(in, "log joint");
  }
  return trace;
}

void write_factors(const std::string& path, const StoredFactors& factors) {
  std::ofstream out = open_output(path, true);
  out.write(kFactorsMagic, 8);
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::uint8_t>(out, factors.kind == ModelKind::topic ? 0 : 1);
  write_pod<std::int64_t>(out, factors.data_rows);
  write_pod<std::int64_t>(out, factors.data_cols);
  write_pod<std::int32_t>(out,
                          static_cast<std::int32_t>(factors.sample.theta.cols()));
  write_matrix(out, factors.sample.theta);
  write_matrix(out, factors.sample.second);
  if (!out) throw ParseError("write failed for '" + path + "'");
}

StoredFactors read_factors(const std::string& path) {
  std::ifstream in = open_input(path, true);
  expect_magic(in, kFactorsMagic, "factor");
  StoredFactors out;
  out.kind = read_pod<std::uint8_t>(in, "model kind") == 0 ? ModelKind::topic
                                                           : ModelKind::mmsb;
  out.data_rows = read_pod<std::int64_t>(in, "rows");
  out.data_cols = read_pod<std::int64_t>(in, "cols");
  const std::int32_t factors = read_pod<std::int32_t>(in, "factors");
  if (out.data_rows <= 0 || out.data_cols <= 0 || factors <= 0) {
    throw ParseError("bad dimensions in factor header");
  }
  const auto [t_rows, t_cols] =
      factor_dims(out.kind, out.data_rows, out.data_cols, factors, false);
  const auto [s_rows, s_cols] =
      factor_dims(out.kind, out.data_rows, out.data_cols, factors, true);
  out.sample.theta = read_matrix(in, t_rows, t_cols, "theta");
  out.sample.second = read_matrix(in, s_rows, s_cols, "factors");
  return out;
}

}  // namespace lppf
