#include "cmh/io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>

#include "cmh/error.hpp"

namespace cmh::io {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_vector(const Vector& v, char sep) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
  }
  return v;
}

Vector parse_vector(std::string_view text, char sep) {
  text = trim(text);
  if (text.empty()) return Vector(0);
  const auto fields = split(text, sep);
  Vector v(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_double(fields[i]);
  return v;
}

Dataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "dataset CSV is empty");
  const auto header = split(trim(line), ',');
  if (header.size() < 2 || trim(header[0]) != "y") {
    throw Error(ErrorKind::ParseError, "dataset header must be y,x1,...,xd");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (trim(header[j]) != "x" + std::to_string(j)) throw Error(ErrorKind::ParseError, "dataset header must be y,x1,...,xd");
  }
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  std::vector<double> values;
  Eigen::Index n = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(trim(line), ',');
    if (static_cast<Eigen::Index>(fields.size()) != d + 1) {
      throw Error(ErrorKind::ParseError, "dataset line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(d + 1) + " columns, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) values.push_back(parse_double(f));
    ++n;
  }
  if (n == 0) throw Error(ErrorKind::ParseError, "dataset has no observations");
  Dataset data;
  data.x.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.y[i] = values[static_cast<std::size_t>(i * (d + 1))];
    for (Eigen::Index j = 0; j < d; ++j) data.x(i, j) = values[static_cast<std::size_t>(i * (d + 1) + j + 1)];
  }
  return data;
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << 'y';
  for (Eigen::Index j = 0; j < data.d(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (Eigen::Index j = 0; j < data.d(); ++j) out << ',' << format_double(data.x(i, j));
    out << '\n';
  }
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<Vector> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    rows.push_back(parse_vector(line, ','));
    if (rows.back().size() != rows.front().size()) throw Error(ErrorKind::ParseError, "ragged matrix CSV");
  }
  if (rows.empty()) throw Error(ErrorKind::ParseError, "matrix CSV is empty");
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace, Eigen::Index dim) {
  out << "step";
  for (Eigen::Index j = 0; j < dim; ++j) out << ",beta_" << (j + 1);
  out << ",accepted\n";
  for (const auto& row : trace) {
    out << row.step << ',' << format_vector(row.position) << ',' << (row.accepted ? 1 : 0) << '\n';
  }
}

void write_rate_csv(std::ostream& out, const std::vector<RatePoint>& series) {
  out << "t,exact_w,lower_bound,asymptotic_bound\n";
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& p : series) {
    out << p.t << ',' << (std::isnan(p.exact_w) ? std::string() : format_double(p.exact_w)) << ','
        << opt(p.lower_bound) << ',' << opt(p.asymptotic_bound) << '\n';
  }
}

void write_coupling_csv(std::ostream& out, const std::vector<CouplingRow>& rows) {
  out << "t,mean_distance,stderr,fraction_coalesced,fraction_at_mode\n";
  for (const auto& r : rows) {
    out << r.t << ',' << format_double(r.mean_distance) << ',' << format_double(r.std_error) << ','
        << format_double(r.fraction_coalesced) << ',' << format_double(r.fraction_at_mode) << '\n';
  }
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

KeyValues read_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::ParseError, "expected key=value, got '" + std::string(t) + "'");
    kv.emplace_back(std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))));
  }
  return kv;
}

KeyValues mode_record(const ModeResult& mode) {
  return {{"beta_star", format_vector(mode.beta_star)},
          {"f_star", format_double(mode.f_star)},
          {"grad_norm", format_double(mode.grad_norm)},
          {"iterations", std::to_string(mode.iterations)},
          {"converged", mode.converged ? "true" : "false"}};
}

ModeResult parse_mode_record(const KeyValues& kv) {
  ModeResult mode;
  bool have_beta = false;
  for (const auto& [k, v] : kv) {
    if (k == "beta_star") {
      mode.beta_star = parse_vector(v);
      have_beta = true;
    } else if (k == "f_star") {
      mode.f_star = parse_double(v);
    } else if (k == "grad_norm") {
      mode.grad_norm = parse_double(v);
    } else if (k == "iterations") {
      mode.iterations = static_cast<int>(parse_double(v));
    } else if (k == "converged") {
      if (v != "true" && v != "false") throw Error(ErrorKind::ParseError, "converged must be true or false");
      mode.converged = v == "true";
    }
  }
  if (!have_beta) throw Error(ErrorKind::ParseError, "mode record lacks beta_star");
  return mode;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cmh::io
