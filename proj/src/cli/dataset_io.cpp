#include "aiedet/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

namespace aiedet {
namespace {

struct Line {
  std::string text;
  std::size_t number = 0;
};

class LineReader {
 public:
  LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  // Next non-comment, non-blank line.
  std::optional<Line> next() {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++number_;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (raw.empty()) continue;
      if (raw.front() == '#') {
        if (!comment_) {
          std::string text = raw.substr(1);
          if (!text.empty() && text.front() == ' ') text.erase(0, 1);
          comment_ = std::move(text);
        }
        continue;
      }
      return Line{std::move(raw), number_};
    }
    return std::nullopt;
  }

  [[noreturn]] void fail(std::size_t line, std::size_t offset, const std::string& msg) const {
    throw DatasetError(source_, line, offset, msg);
  }

  std::size_t last_line() const { return number_; }
  const std::optional<std::string>& comment() const { return comment_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t number_ = 0;
  std::optional<std::string> comment_;
};

std::vector<std::pair<std::string_view, std::size_t>> split_spaces(std::string_view s) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    out.emplace_back(s.substr(start, i - start), start + 1);
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Parses `re+imj` / `re-imj`. Returns nullopt on malformed text; the caller
// checks finiteness separately so NaN/Inf get their own message.
std::optional<Complex> parse_entry(std::string_view tok) {
  if (tok.size() < 4 || tok.back() != 'j') return std::nullopt;
  tok.remove_suffix(1);
  std::size_t split = std::string_view::npos;
  for (std::size_t i = tok.size(); i-- > 1;) {
    if ((tok[i] == '+' || tok[i] == '-') && tok[i - 1] != 'e' && tok[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) return std::nullopt;
  const auto re = parse_real(tok.substr(0, split));
  const auto im = parse_real(tok.substr(split));
  if (!re || !im) return std::nullopt;
  return Complex(*re, *im);
}

Index parse_dim(LineReader& r, const Line& header, std::string_view tok, std::size_t col,
                std::string_view name) {
  if (tok.size() <= name.size() + 1 || tok.substr(0, name.size()) != name ||
      tok[name.size()] != '=') {
    r.fail(header.number, col, "expected " + std::string(name) + "=<int>, got '" +
                                   std::string(tok) + "'");
  }
  const std::string_view digits = tok.substr(name.size() + 1);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || v < 1) {
    r.fail(header.number, col, "dimension " + std::string(name) + " must be a positive integer");
  }
  return static_cast<Index>(v);
}

CMatrix read_block(LineReader& r, std::string_view label, Index rows, Index cols) {
  const auto head = r.next();
  if (!head) r.fail(r.last_line() + 1, 1, "missing block '" + std::string(label) + "'");
  if (head->text != label) {
    r.fail(head->number, 1, "expected block label '" + std::string(label) + "', got '" +
                                head->text + "'");
  }
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const auto line = r.next();
    if (!line) {
      r.fail(r.last_line() + 1, 1, "block " + std::string(label) + " ends after " +
                                       std::to_string(i) + " of " + std::to_string(rows) +
                                       " rows");
    }
    const auto tokens = split_spaces(line->text);
    if (static_cast<Index>(tokens.size()) != cols) {
      r.fail(line->number, 1, "block " + std::string(label) + " row " + std::to_string(i + 1) +
                                  " has " + std::to_string(tokens.size()) +
                                  " entries, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) {
      const auto& [tok, col] = tokens[static_cast<std::size_t>(j)];
      const auto v = parse_entry(tok);
      if (!v) r.fail(line->number, col, "malformed complex entry '" + std::string(tok) + "'");
      if (!std::isfinite(v->real()) || !std::isfinite(v->imag())) {
        r.fail(line->number, col, "non-finite entry '" + std::string(tok) + "'");
      }
      m(i, j) = *v;
    }
  }
  return m;
}

void append_entry(std::string& out, Complex v) {
  out += format_double(v.real());
  out += std::signbit(v.imag()) ? '-' : '+';
  out += format_double(std::abs(v.imag()));
  out += 'j';
}

void write_block(std::ostream& os, const char* label, const CMatrix& m) {
  os << label << '\n';
  std::string line;
  for (Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) line += ' ';
      append_entry(line, m(i, j));
    }
    os << line << '\n';
  }
}

}  // namespace

DatasetError::DatasetError(const std::string& source, std::size_t line, std::size_t offset,
                           const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(offset) +
                         ": " + msg),
      line_(line),
      offset_(offset) {}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

ExternalDataset parse_dataset(std::istream& in, const std::string& source_name) {
  LineReader r(in, source_name);
  const auto header = r.next();
  if (!header) r.fail(1, 1, "empty dataset");
  const auto tokens = split_spaces(header->text);
  if (tokens.size() != 5 || tokens[0].first != "HCD1") {
    r.fail(header->number, 1, "header must be 'HCD1 N=<n> K=<k> L=<l> P=<p>'");
  }
  const Index n = parse_dim(r, *header, tokens[1].first, tokens[1].second, "N");
  const Index k = parse_dim(r, *header, tokens[2].first, tokens[2].second, "K");
  const Index l = parse_dim(r, *header, tokens[3].first, tokens[3].second, "L");
  const Index p = parse_dim(r, *header, tokens[4].first, tokens[4].second, "P");

  CMatrix z = read_block(r, "Z", n, k);
  CMatrix z_l = read_block(r, "ZL", n, l);
  CMatrix h = read_block(r, "H", n, p);
  if (const auto extra = r.next()) {
    r.fail(extra->number, 1, "unexpected content after block H");
  }
  try {
    return ExternalDataset{DetectionInput(std::move(z), std::move(z_l), std::move(h)),
                           r.comment().value_or("")};
  } catch (const InvalidParameter& e) {
    r.fail(header->number, 1, e.what());
  }
}

ExternalDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(path.string(), 0, 0, "cannot open file");
  return parse_dataset(in, path.string());
}

void write_dataset(std::ostream& out, const DetectionInput& input, const std::string& source) {
  out << "HCD1 N=" << input.n() << " K=" << input.k() << " L=" << input.l()
      << " P=" << input.p() << '\n';
  if (!source.empty()) out << "# " << source << '\n';
  write_block(out, "Z", input.z());
  write_block(out, "ZL", input.z_l());
  write_block(out, "H", input.h());
}

void save_dataset(const std::filesystem::path& path, const DetectionInput& input,
                  const std::string& source) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_dataset(out, input, source);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace aiedet
