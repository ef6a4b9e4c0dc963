#include "aircomp/correlation_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "aircomp/error.hpp"
#include "aircomp/format.hpp"

namespace aircomp {

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  /// Next non-blank line; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    if (!at_end_) {
      at_end_ = true;
      ++line_no_;  // errors at end of input point just past the last line
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
  bool at_end_ = false;
};

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::size_t parse_count(std::string_view text, LineReader& reader, std::string_view what) {
  std::size_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    reader.fail("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

std::string_view key_value(std::string_view token, std::string_view key, LineReader& reader) {
  if (!token.starts_with(key) || token.size() <= key.size() || token[key.size()] != '=') {
    reader.fail("expected " + std::string(key) + "=<value>, got '" + std::string(token) + "'");
  }
  return token.substr(key.size() + 1);
}

Matrix read_block(LineReader& reader, std::string_view name, std::size_t rows, std::size_t cols) {
  std::string line;
  if (!reader.next(line)) reader.fail("missing '" + std::string(name) + "' block header");
  const auto head = split_ws(line);
  if (head.size() != 3 || head[0] != name) {
    reader.fail("expected '" + std::string(name) + " <rows> <cols>'");
  }
  const std::size_t r = parse_count(head[1], reader, "row count");
  const std::size_t c = parse_count(head[2], reader, "column count");
  if (r != rows || c != cols) {
    reader.fail(std::string(name) + " is declared " + std::to_string(r) + "x" + std::to_string(c) +
                " but K and M require " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::vector<double> entries;
  entries.reserve(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!reader.next(line)) {
      reader.fail(std::string(name) + " has " + std::to_string(i) + " rows, expected " +
                  std::to_string(rows));
    }
    const auto fields = split_ws(line);
    if (fields.size() != cols) {
      reader.fail(std::string(name) + " row " + std::to_string(i) + " has " +
                  std::to_string(fields.size()) + " entries, expected " + std::to_string(cols));
    }
    for (auto field : fields) {
      double v = 0.0;
      try {
        v = parse_double_strict(field, "entry");
      } catch (const ValidationError& e) {
        reader.fail(e.what());
      }
      if (!std::isfinite(v)) reader.fail("non-finite entry");
      entries.push_back(v);
    }
  }
  return Matrix::from_rows(rows, cols, std::move(entries));
}

}  // namespace

CorrelationModel parse_correlation_model(std::istream& in, const std::string& source) {
  LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) reader.fail("empty correlation file");
  const auto head = split_ws(line);
  if (head.size() != 5 || head[0] != "aircomp-corr" || head[1] != "v1") {
    reader.fail("expected header 'aircomp-corr v1 K=<k> M=<m> rkind=<kind>'");
  }
  const std::size_t K = parse_count(key_value(head[2], "K", reader), reader, "K");
  const std::size_t M = parse_count(key_value(head[3], "M", reader), reader, "M");
  SubgaussianKind kind{};
  try {
    kind = parse_subgaussian_kind(key_value(head[4], "rkind", reader));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    reader.fail(e.what());
  }
  if (K == 0 || M == 0) reader.fail("K and M must be positive");
  const std::size_t n = 2 * K * M + 2 * M;
  if (n > kMaxDenseColumns) {
    reader.fail("2KM+2M = " + std::to_string(n) + " exceeds the dense limit " +
                std::to_string(kMaxDenseColumns));
  }
  Matrix a = read_block(reader, "A", 2 * K * M, n);
  Matrix b = read_block(reader, "B", 2 * M, n);
  if (reader.next(line)) reader.fail("unexpected trailing content");
  return dense_model(K, M, std::move(a), std::move(b), kind);
}

CorrelationModel read_correlation_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open correlation file " + path.string());
  return parse_correlation_model(in, path.string());
}

void write_correlation_model(const CorrelationModel& model, std::ostream& out) {
  const auto write_matrix = [&out](const char* name, const Matrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ' ';
        out << format_double(row[c]);
      }
      out << '\n';
    }
  };
  out << "aircomp-corr v1 K=" << model.users() << " M=" << model.uses()
      << " rkind=" << to_string(model.r_kind()) << '\n';
  write_matrix("A", model.fading_matrix());
  write_matrix("B", model.noise_matrix());
}

void write_correlation_model(const CorrelationModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write correlation file " + path.string());
  write_correlation_model(model, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace aircomp
