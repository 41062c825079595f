#include "vbsbl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace vbsbl {

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& token, const std::string& source, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_error(source, line, "bad number '" + token + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, bool commas_separate) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ' ' || ch == '\t' || (commas_separate && ch == ',')) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

AnyMatrix parse_matrix(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string s = strip(raw);
    if (s.empty() || s[0] == '#') continue;
    lines.emplace_back(lineno, s);
  }
  if (lines.empty()) throw Error(ErrorCode::ParseError, source + ": no data");

  if (lines.front().second.rfind("vbsbl-matrix", 0) != 0) {
    // Real CSV fallback.
    std::vector<std::vector<double>> rows;
    for (const auto& [ln, s] : lines) {
      std::vector<double> row;
      for (const auto& tok : split(s, true)) row.push_back(to_double(tok, source, ln));
      if (!rows.empty() && row.size() != rows.front().size()) parse_error(source, ln, "ragged CSV row");
      rows.push_back(std::move(row));
    }
    Mat<Real> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
    return m;
  }

  const auto [hline, header] = lines.front();
  const auto fields = split(header, false);
  if (fields.size() != 5 || fields[1] != "1") parse_error(source, hline, "expected 'vbsbl-matrix 1 <rows> <cols> real|complex'");
  const double rows_d = to_double(fields[2], source, hline);
  const double cols_d = to_double(fields[3], source, hline);
  if (rows_d < 0 || cols_d < 0 || rows_d != std::floor(rows_d) || cols_d != std::floor(cols_d)) {
    parse_error(source, hline, "bad dimensions");
  }
  const auto rows = static_cast<Index>(rows_d);
  const auto cols = static_cast<Index>(cols_d);
  const bool complex = fields[4] == "complex";
  if (!complex && fields[4] != "real") parse_error(source, hline, "field must be 'real' or 'complex'");
  if (static_cast<Index>(lines.size()) - 1 != rows) {
    parse_error(source, hline, "header declares " + std::to_string(rows) + " rows, found " +
                                   std::to_string(lines.size() - 1));
  }

  if (complex) {
    Mat<Complex> m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      const auto& [ln, s] = lines[static_cast<std::size_t>(r) + 1];
      const auto toks = split(s, false);
      if (static_cast<Index>(toks.size()) != cols) parse_error(source, ln, "wrong number of entries");
      for (Index c = 0; c < cols; ++c) {
        const std::string& t = toks[static_cast<std::size_t>(c)];
        const auto comma = t.find(',');
        if (comma == std::string::npos) {
          m(r, c) = Complex(to_double(t, source, ln), 0.0);
        } else {
          m(r, c) = Complex(to_double(t.substr(0, comma), source, ln), to_double(t.substr(comma + 1), source, ln));
        }
      }
    }
    return m;
  }
  Mat<Real> m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& [ln, s] = lines[static_cast<std::size_t>(r) + 1];
    const auto toks = split(s, true);
    if (static_cast<Index>(toks.size()) != cols) parse_error(source, ln, "wrong number of entries");
    for (Index c = 0; c < cols; ++c) m(r, c) = to_double(toks[static_cast<std::size_t>(c)], source, ln);
  }
  return m;
}

AnyMatrix read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return parse_matrix(in, path);
}

bool is_complex(const AnyMatrix& m) noexcept { return std::holds_alternative<Mat<Complex>>(m); }

template <>
Mat<Real> as_field<Real>(const AnyMatrix& m) {
  if (const auto* r = std::get_if<Mat<Real>>(&m)) return *r;
  throw Error(ErrorCode::ParseError, "complex matrix where real data was expected");
}

template <>
Mat<Complex> as_field<Complex>(const AnyMatrix& m) {
  if (const auto* c = std::get_if<Mat<Complex>>(&m)) return *c;
  return std::get<Mat<Real>>(m).cast<Complex>();
}

template <class Scalar>
void write_matrix(std::ostream& out, const Mat<Scalar>& m) {
  out << "vbsbl-matrix 1 " << m.rows() << ' ' << m.cols() << (is_complex_v<Scalar> ? " complex\n" : " real\n");
  out << std::setprecision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ' ';
      if constexpr (is_complex_v<Scalar>) {
        out << m(r, c).real() << ',' << m(r, c).imag();
      } else {
        out << m(r, c);
      }
    }
    out << '\n';
  }
}

template <class Scalar>
void write_matrix(const std::string& path, const Mat<Scalar>& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write '" + path + "'");
  write_matrix(out, m);
}

template void write_matrix(std::ostream&, const Mat<Real>&);
template void write_matrix(std::ostream&, const Mat<Complex>&);
template void write_matrix(const std::string&, const Mat<Real>&);
template void write_matrix(const std::string&, const Mat<Complex>&);

}  // namespace vbsbl
