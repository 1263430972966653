#include "maxlin/csv_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace maxlin {

std::string FormatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double ParseDouble(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw CsvError("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

namespace {

std::vector<std::string> NonEmptyLines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string Where(std::size_t line_no) {
  return "line " + std::to_string(line_no + 1) + ": ";
}

}  // namespace

void WriteDatasetCsv(std::ostream& out, const Dataset& data) {
  data.Validate();
  for (std::size_t j = 0; j < data.p(); ++j) out << 'x' << (j + 1) << ',';
  out << 'y';
  if (data.w) out << ",w";
  out << '\n';
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (double v : data.X.row(i)) out << FormatDouble(v) << ',';
    out << FormatDouble(data.y[i]);
    if (data.w) out << ',' << FormatDouble((*data.w)[i]);
    out << '\n';
  }
}

Dataset ReadDatasetCsv(std::istream& in) {
  const auto lines = NonEmptyLines(in);
  if (lines.empty()) throw CsvError("dataset CSV: missing header");
  const auto header = SplitCsvLine(lines[0]);
  std::size_t p = 0;
  while (p < header.size() && header[p] == "x" + std::to_string(p + 1)) ++p;
  if (p == 0) throw CsvError("dataset CSV: header must start with x1");
  const std::size_t rest = header.size() - p;
  const bool has_w = rest == 2 && header[p] == "y" && header[p + 1] == "w";
  if (!(rest == 1 && header[p] == "y") && !has_w) {
    throw CsvError("dataset CSV: header must be x1,...,xp,y[,w]");
  }
  const std::size_t n = lines.size() - 1;
  Dataset d{DenseMatrix(n, p), std::vector<double>(n), std::nullopt};
  if (has_w) d.w.emplace(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fields = SplitCsvLine(lines[i + 1]);
    if (fields.size() != header.size()) {
      throw CsvError(Where(i + 1) + "expected " + std::to_string(header.size()) +
                     " fields, got " + std::to_string(fields.size()));
    }
    try {
      for (std::size_t j = 0; j < p; ++j) d.X(i, j) = ParseDouble(fields[j]);
      d.y[i] = ParseDouble(fields[p]);
      if (has_w) (*d.w)[i] = ParseDouble(fields[p + 1]);
    } catch (const CsvError& e) {
      throw CsvError(Where(i + 1) + e.what());
    }
  }
  try {
    d.Validate();
  } catch (const std::invalid_argument& e) {
    throw CsvError(std::string("dataset CSV: ") + e.what());
  }
  return d;
}

void WriteParamBlocksCsv(std::ostream& out, const ParamBlocks& beta) {
  out << "component";
  for (std::size_t c = 0; c < beta.p(); ++c) out << ",coord" << (c + 1);
  out << '\n';
  for (std::size_t j = 0; j < beta.k(); ++j) {
    out << (j + 1);
    for (double v : beta.block(j)) out << ',' << FormatDouble(v);
    out << '\n';
  }
}

ParamBlocks ReadParamBlocksCsv(std::istream& in) {
  const auto lines = NonEmptyLines(in);
  if (lines.empty()) throw CsvError("parameter CSV: missing header");
  const auto header = SplitCsvLine(lines[0]);
  if (header.size() < 2 || header[0] != "component") {
    throw CsvError("parameter CSV: header must be component,coord1,...,coordp");
  }
  const std::size_t p = header.size() - 1;
  for (std::size_t c = 0; c < p; ++c) {
    if (header[c + 1] != "coord" + std::to_string(c + 1)) {
      throw CsvError("parameter CSV: bad header field '" + std::string(header[c + 1]) +
                     "'");
    }
  }
  const std::size_t k = lines.size() - 1;
  if (k == 0) throw CsvError("parameter CSV: no components");
  std::vector<double> flat(k * p);
  for (std::size_t j = 0; j < k; ++j) {
    const auto fields = SplitCsvLine(lines[j + 1]);
    if (fields.size() != p + 1) throw CsvError(Where(j + 1) + "wrong field count");
    try {
      if (ParseDouble(fields[0]) != static_cast<double>(j + 1)) {
        throw CsvError("components must be numbered 1..k in order");
      }
      for (std::size_t c = 0; c < p; ++c) flat[j * p + c] = ParseDouble(fields[c + 1]);
    } catch (const CsvError& e) {
      throw CsvError(Where(j + 1) + e.what());
    }
  }
  try {
    return ParamBlocks(k, p, std::move(flat));
  } catch (const std::invalid_argument& e) {
    throw CsvError(std::string("parameter CSV: ") + e.what());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  return ReadDatasetCsv(in);
}

void SaveDataset(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream out;
  WriteDatasetCsv(out, data);
  WriteFile(path, out.str());
}

ParamBlocks LoadParamBlocks(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  return ReadParamBlocksCsv(in);
}

void SaveParamBlocks(const std::filesystem::path& path, const ParamBlocks& beta) {
  std::ostringstream out;
  WriteParamBlocksCsv(out, beta);
  WriteFile(path, out.str());
}

}  // namespace maxlin
